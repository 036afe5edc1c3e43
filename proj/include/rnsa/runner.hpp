#pragma once

#include <optional>
#include <string>

#include "rnsa/bounds.hpp"
#include "rnsa/checkpoint.hpp"
#include "rnsa/config.hpp"
#include "rnsa/diagnostics.hpp"
#include "rnsa/report.hpp"

namespace rnsa {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBlowUp = 3;

// Seed streams under the master seed (run.seed). The forcing and initial
// fields use their own config seeds, since they define the problem rather
// than the sampling.
namespace seed_stream {
inline constexpr std::uint64_t tangent_direction = 2;
inline constexpr std::uint64_t estimator = 3;
inline constexpr std::uint64_t pair_base = 100;      // 2 per pair
inline constexpr std::uint64_t squeeze_base = 10000; // 2 per pair
inline constexpr std::uint64_t probe_base = 20000;   // 1 per tail probe
} // namespace seed_stream

struct RunContext {
    ParsedConfig pc;
    LatticePtr lat;
    SimParams params;
    StepperConfig stepper;
    long sample_stride = 1;
};

RunContext make_context(const ParsedConfig& pc);
SimState initial_state(const RunContext& ctx);

struct CmdOptions {
    std::string out_dir = "out";
    int threads = 1;
    std::optional<std::string> resume;
    std::optional<std::uint64_t> seed_override;
    bool corrupt_bilinear = false;   // verify-only fault injection
};

int cmd_simulate(const ParsedConfig& pc, const CmdOptions& opt);
int cmd_pair(const ParsedConfig& pc, const CmdOptions& opt);
int cmd_squeeze(const ParsedConfig& pc, const CmdOptions& opt);
int cmd_tangent(const ParsedConfig& pc, const CmdOptions& opt);
int cmd_bounds(const ParsedConfig& pc, const CmdOptions& opt);
int cmd_verify(const ParsedConfig& pc, const CmdOptions& opt);

} // namespace rnsa
