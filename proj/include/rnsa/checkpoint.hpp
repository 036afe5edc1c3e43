#pragma once

#include <string>

#include "rnsa/integrator.hpp"

namespace rnsa {

// Binary state snapshot. Little-endian throughout:
//   "RNSA" | u32 version | u8 endian tag (1) | 3 pad bytes |
//   u32 n[3] | f64 a[3] | f64 nu, alpha, f, t | u32 header crc |
//   u64 mode count | per canonical mode: 3 x (re, im) f64 | u32 payload crc
// The payload covers the retained modes in canonical lexicographic order, so
// a write/read round trip reproduces coefficients bitwise.

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::uint32_t crc32(const unsigned char* data, std::size_t len, std::uint32_t seed = 0);

struct CheckpointHeader {
    std::array<int, 3> n;
    std::array<double, 3> a;
    double nu, alpha, f, t;
};

void write_checkpoint(const std::string& path, const SimState& s, const SimParams& p);

CheckpointHeader read_checkpoint_header(const std::string& path);

// Validates magic, version, CRCs, and lattice/parameter agreement, then
// returns the stored state on the supplied lattice.
SimState read_checkpoint(const std::string& path, const LatticePtr& lat,
                         const SimParams& expected);

} // namespace rnsa
