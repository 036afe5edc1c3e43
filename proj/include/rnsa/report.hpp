#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rnsa {

inline constexpr const char* kToolVersion = "1.0.0";

std::string format_real(double x);   // %.17g, round-trip exact

// RFC-4180 output: comma separated, CRLF line endings, mandatory header row.
// Every row carries the effective config hash and tool version in the trailing
// columns so any file can be traced back to its configuration.
class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> columns,
              std::string config_hash);
    void row(const std::vector<std::string>& values);
    void write();   // flush to disk; also called by destructor paths explicitly

private:
    std::string path_;
    std::size_t columns_;
    std::string text_;
    std::string hash_;
};

void write_json_report(const std::string& path, nlohmann::json j,
                       const std::string& config_hash);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace rnsa
