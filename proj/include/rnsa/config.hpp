#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rnsa {

// Flat sectioned key-value configuration. A file whose first non-blank byte is
// '{' is read as JSON with the same section/key structure. Unknown keys are
// rejected with a nearest-key suggestion; parsing the emitted effective text
// reproduces the configuration exactly.
struct ExperimentConfig {
    // [lattice]
    int n1 = 32, n2 = 32, n3 = 32;
    double a1 = 1.0, a2 = 1.0, a3 = 1.0;
    double dealias = 2.0 / 3.0;
    bool allow_anisotropic_a1 = false;

    // [params]
    double nu = 1.0;
    double alpha = 0.0;
    double f = 0.0;

    // [forcing] time-independent random divergence-free field; amplitude 0 disables
    std::uint64_t forcing_seed = 7;
    double forcing_k_min = 1.0;
    double forcing_k_max = 2.0;
    double forcing_amplitude = 0.0;

    // [init]
    std::uint64_t init_seed = 1;
    double init_k_min = 1.0;
    double init_k_max = 2.5;
    double init_amplitude = 1.0;

    // [stepper]
    double dt = 1e-3;
    std::string scheme = "ifrk4";
    double cfl_safety = 0.5;
    bool adapt = false;

    // [run]
    double t_final = 1.0;
    double sample_every = 1e-2;
    double transient = 0.0;
    double beta = 2.6;
    double window = 1.0;
    std::uint64_t seed = 1234;     // master seed; CLI --seed overrides

    // [pair]
    long pair_count = 4;
    double pair_amplitude = 1e-3;
    double pair_t_final = 1.0;

    // [squeeze]
    long squeeze_pairs = 16;
    double squeeze_delta = 0.125;
    double squeeze_t_star = 0.0;   // 0 = derive from measured radii
    long squeeze_n0 = 0;           // 0 = search for the minimal rank

    // [tangent]
    double tangent_t_final = 0.5;
    std::vector<double> tangent_epsilons = {1e-2, 1e-3, 1e-4};
    double tangent_fd_epsilon = 1e-5;
    std::string tangent_variant = "both";   // filtered | unfiltered | both
    long tail_probes = 4;
    double tail_t_star = 0.25;
    long tail_max_shells = 12;

    // [estimator]
    long estimator_samples = 40;

    // [bounds]
    std::string bounds_rho_mode = "manual";   // manual | measured
    std::string bounds_measured_from;         // absorbing report path for measured mode
    double rho_h = 1.0;
    double rho_v = 1.0;
    double c1 = 1.0, c2 = 1.0, c3 = 1.0;
    double c_tilde = 1.0;
    double c = 1.0;
    double theta = 0.5;
    long bounds_n0 = -1;                      // -1 = use the searched minimum
};

struct ParsedConfig {
    ExperimentConfig cfg;
    std::vector<std::string> warnings;
    std::string effective_text;   // canonical INI echo with defaults applied
    std::string hash;             // CRC-32 of effective_text, 8 hex digits
};

ParsedConfig finalize_config(const ExperimentConfig& cfg);
ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);

} // namespace rnsa
