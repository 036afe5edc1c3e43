#include "rnsa/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "rnsa/checkpoint.hpp"
#include "rnsa/errors.hpp"

namespace rnsa {

namespace {

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a real number, got '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos, 10);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos, 10);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) out.push_back(parse_real(key, tok));
    if (out.empty()) throw ConfigError(key + ": expected at least one real number");
    return out;
}

std::string fmt_real_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        out += fmt_real(xs[i]);
    }
    return out;
}

struct Entry {
    std::string section;
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define REAL_ENTRY(sec, name, field)                                              \
    Entry{sec, name,                                                              \
          [](ExperimentConfig& c, const std::string& v) {                         \
              c.field = parse_real(sec "." name, v);                              \
          },                                                                      \
          [](const ExperimentConfig& c) { return fmt_real(c.field); }}
#define INT_ENTRY(sec, name, field)                                               \
    Entry{sec, name,                                                              \
          [](ExperimentConfig& c, const std::string& v) {                         \
              c.field = parse_int(sec "." name, v);                               \
          },                                                                      \
          [](const ExperimentConfig& c) { return std::to_string(c.field); }}
#define U64_ENTRY(sec, name, field)                                               \
    Entry{sec, name,                                                              \
          [](ExperimentConfig& c, const std::string& v) {                         \
              c.field = parse_u64(sec "." name, v);                               \
          },                                                                      \
          [](const ExperimentConfig& c) { return std::to_string(c.field); }}
#define BOOL_ENTRY(sec, name, field)                                              \
    Entry{sec, name,                                                              \
          [](ExperimentConfig& c, const std::string& v) {                         \
              c.field = parse_bool(sec "." name, v);                              \
          },                                                                      \
          [](const ExperimentConfig& c) { return c.field ? "true" : "false"; }}
#define STR_ENTRY(sec, name, field)                                               \
    Entry{sec, name,                                                              \
          [](ExperimentConfig& c, const std::string& v) { c.field = v; },         \
          [](const ExperimentConfig& c) { return c.field; }}

const std::vector<Entry>& schema() {
    static const std::vector<Entry> table = {
        INT_ENTRY("lattice", "n1", n1),
        INT_ENTRY("lattice", "n2", n2),
        INT_ENTRY("lattice", "n3", n3),
        REAL_ENTRY("lattice", "a1", a1),
        REAL_ENTRY("lattice", "a2", a2),
        REAL_ENTRY("lattice", "a3", a3),
        REAL_ENTRY("lattice", "dealias", dealias),
        BOOL_ENTRY("lattice", "allow_anisotropic_a1", allow_anisotropic_a1),
        REAL_ENTRY("params", "nu", nu),
        REAL_ENTRY("params", "alpha", alpha),
        REAL_ENTRY("params", "f", f),
        U64_ENTRY("forcing", "seed", forcing_seed),
        REAL_ENTRY("forcing", "k_min", forcing_k_min),
        REAL_ENTRY("forcing", "k_max", forcing_k_max),
        REAL_ENTRY("forcing", "amplitude", forcing_amplitude),
        U64_ENTRY("init", "seed", init_seed),
        REAL_ENTRY("init", "k_min", init_k_min),
        REAL_ENTRY("init", "k_max", init_k_max),
        REAL_ENTRY("init", "amplitude", init_amplitude),
        REAL_ENTRY("stepper", "dt", dt),
        STR_ENTRY("stepper", "scheme", scheme),
        REAL_ENTRY("stepper", "cfl_safety", cfl_safety),
        BOOL_ENTRY("stepper", "adapt", adapt),
        REAL_ENTRY("run", "t_final", t_final),
        REAL_ENTRY("run", "sample_every", sample_every),
        REAL_ENTRY("run", "transient", transient),
        REAL_ENTRY("run", "beta", beta),
        REAL_ENTRY("run", "window", window),
        U64_ENTRY("run", "seed", seed),
        INT_ENTRY("pair", "count", pair_count),
        REAL_ENTRY("pair", "amplitude", pair_amplitude),
        REAL_ENTRY("pair", "t_final", pair_t_final),
        INT_ENTRY("squeeze", "pairs", squeeze_pairs),
        REAL_ENTRY("squeeze", "delta", squeeze_delta),
        REAL_ENTRY("squeeze", "t_star", squeeze_t_star),
        INT_ENTRY("squeeze", "n0", squeeze_n0),
        REAL_ENTRY("tangent", "t_final", tangent_t_final),
        Entry{"tangent", "epsilons",
              [](ExperimentConfig& c, const std::string& v) {
                  c.tangent_epsilons = parse_real_list("tangent.epsilons", v);
              },
              [](const ExperimentConfig& c) { return fmt_real_list(c.tangent_epsilons); }},
        REAL_ENTRY("tangent", "fd_epsilon", tangent_fd_epsilon),
        STR_ENTRY("tangent", "variant", tangent_variant),
        INT_ENTRY("tangent", "tail_probes", tail_probes),
        REAL_ENTRY("tangent", "tail_t_star", tail_t_star),
        INT_ENTRY("tangent", "tail_max_shells", tail_max_shells),
        INT_ENTRY("estimator", "samples", estimator_samples),
        STR_ENTRY("bounds", "rho_mode", bounds_rho_mode),
        STR_ENTRY("bounds", "measured_from", bounds_measured_from),
        REAL_ENTRY("bounds", "rho_h", rho_h),
        REAL_ENTRY("bounds", "rho_v", rho_v),
        REAL_ENTRY("bounds", "c1", c1),
        REAL_ENTRY("bounds", "c2", c2),
        REAL_ENTRY("bounds", "c3", c3),
        REAL_ENTRY("bounds", "c_tilde", c_tilde),
        REAL_ENTRY("bounds", "c", c),
        REAL_ENTRY("bounds", "theta", theta),
        INT_ENTRY("bounds", "n0", bounds_n0),
    };
    return table;
}

#undef REAL_ENTRY
#undef INT_ENTRY
#undef U64_ENTRY
#undef BOOL_ENTRY
#undef STR_ENTRY

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

const Entry* find_entry(const std::string& section, const std::string& key) {
    for (const Entry& e : schema())
        if (e.section == section && e.key == key) return &e;
    return nullptr;
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
    const std::string path = section + "." + key;
    std::string best;
    std::size_t best_d = static_cast<std::size_t>(-1);
    for (const Entry& e : schema()) {
        const std::string cand = e.section + "." + e.key;
        const std::size_t d = edit_distance(path, cand);
        if (d < best_d) {
            best_d = d;
            best = cand;
        }
    }
    throw ConfigError("unknown config key '" + path + "'; nearest valid key is '" + best + "'");
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

void apply_pair(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                const std::string& value) {
    const Entry* e = find_entry(section, key);
    if (!e) unknown_key(section, key);
    e->set(cfg, value);
}

void parse_ini_into(ExperimentConfig& cfg, const std::string& text) {
    std::istringstream is(text);
    std::string line, section;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        apply_pair(cfg, section, key, value);
    }
}

void parse_json_into(ExperimentConfig& cfg, const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config JSON must be an object of sections");
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object())
            throw ConfigError("config JSON section '" + section + "' must be an object");
        for (const auto& [key, val] : body.items()) {
            std::string v;
            if (val.is_string()) {
                v = val.get<std::string>();
            } else if (val.is_boolean()) {
                v = val.get<bool>() ? "true" : "false";
            } else if (val.is_number_integer()) {
                v = std::to_string(val.get<long long>());
            } else if (val.is_number_unsigned()) {
                v = std::to_string(val.get<unsigned long long>());
            } else if (val.is_number_float()) {
                v = fmt_real(val.get<double>());
            } else if (val.is_array()) {
                std::string acc;
                for (const auto& x : val) {
                    if (!x.is_number())
                        throw ConfigError("config JSON: list values must be numeric");
                    if (!acc.empty()) acc += ' ';
                    acc += fmt_real(x.get<double>());
                }
                v = acc;
            } else {
                throw ConfigError("config JSON: unsupported value type for '" + section + "." +
                                  key + "'");
            }
            apply_pair(cfg, section, key, v);
        }
    }
}

void semantic_checks(const ExperimentConfig& c, std::vector<std::string>& warnings) {
    if (c.dealias > 2.0 / 3.0 + 1e-12)
        throw ConfigError("lattice.dealias exceeds 2/3; quadratic products would alias");
    if (c.scheme != "ifrk4")
        throw ConfigError("stepper.scheme: only 'ifrk4' is implemented");
    if (!(c.dt > 0.0)) throw ConfigError("stepper.dt must be positive");
    if (c.t_final < 0.0) throw ConfigError("run.t_final must be nonnegative");
    if (!(c.sample_every > 0.0)) throw ConfigError("run.sample_every must be positive");
    if (!(c.nu >= 0.0)) throw ConfigError("params.nu must be nonnegative");
    if (c.alpha < 0.0) throw ConfigError("params.alpha must be nonnegative");
    if (c.pair_count < 1) throw ConfigError("pair.count must be at least 1");
    if (c.squeeze_pairs < 1) throw ConfigError("squeeze.pairs must be at least 1");
    if (!(c.squeeze_delta > 0.0) || !(c.squeeze_delta < 0.25))
        throw ConfigError("squeeze.delta must lie in (0, 1/4)");
    if (c.tangent_variant != "both" && c.tangent_variant != "filtered" &&
        c.tangent_variant != "unfiltered")
        throw ConfigError("tangent.variant must be filtered, unfiltered, or both");
    if (c.bounds_rho_mode != "manual" && c.bounds_rho_mode != "measured")
        throw ConfigError("bounds.rho_mode must be manual or measured");
    if (c.estimator_samples < 1) throw ConfigError("estimator.samples must be at least 1");
    if (c.beta <= 2.5)
        warnings.push_back("run.beta <= 5/2: the regularity arguments behind the "
                           "contraction estimates assume beta > 5/2");
    if (c.a1 != 1.0 && c.allow_anisotropic_a1)
        warnings.push_back("lattice.a1 != 1 overrides the a1 = 1 normalization; "
                           "reported constants are not comparable across runs");
    const double stride = c.sample_every / c.dt;
    if (std::abs(stride - std::llround(stride)) > 1e-6)
        warnings.push_back("run.sample_every is not a multiple of stepper.dt; "
                           "sampling snaps to the nearest step count");
}

} // namespace

std::string emit_config(const ExperimentConfig& cfg) {
    std::string out;
    std::string current;
    for (const Entry& e : schema()) {
        if (e.section != current) {
            if (!out.empty()) out += '\n';
            out += '[' + e.section + "]\n";
            current = e.section;
        }
        out += e.key;
        out += " = ";
        out += e.get(cfg);
        out += '\n';
    }
    return out;
}

ParsedConfig finalize_config(const ExperimentConfig& cfg) {
    ParsedConfig pc;
    pc.cfg = cfg;
    semantic_checks(pc.cfg, pc.warnings);
    pc.effective_text = emit_config(pc.cfg);
    const std::uint32_t h = crc32(
        reinterpret_cast<const unsigned char*>(pc.effective_text.data()),
        pc.effective_text.size());
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", h);
    pc.hash = buf;
    return pc;
}

ParsedConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        parse_json_into(cfg, text);
    else
        parse_ini_into(cfg, text);
    return finalize_config(cfg);
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config_text(os.str());
}

} // namespace rnsa
