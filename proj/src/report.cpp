#include "rnsa/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rnsa/errors.hpp"

namespace rnsa {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns,
                     std::string config_hash)
    : path_(std::move(path)), hash_(std::move(config_hash)) {
    columns.push_back("config_hash");
    columns.push_back("tool_version");
    columns_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) text_ += ',';
        text_ += columns[i];
    }
    text_ += "\r\n";
}

void CsvWriter::row(const std::vector<std::string>& values) {
    if (values.size() + 2 != columns_)
        throw Error("csv row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ',';
        text_ += values[i];
    }
    text_ += ',';
    text_ += hash_;
    text_ += ',';
    text_ += kToolVersion;
    text_ += "\r\n";
}

void CsvWriter::write() { write_text_file(path_, text_); }

void write_json_report(const std::string& path, nlohmann::json j,
                       const std::string& config_hash) {
    j["config_hash"] = config_hash;
    j["tool_version"] = kToolVersion;
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("short write to " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace rnsa
