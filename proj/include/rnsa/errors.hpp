#pragma once

#include <stdexcept>
#include <string>

namespace rnsa {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LatticeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct CheckpointError : Error {
    enum class Kind { io, magic, version, crc, shape };
    Kind kind;
    CheckpointError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
};

struct BlowUpError : Error {
    double t;
    BlowUpError(double time, const std::string& msg) : Error(msg), t(time) {}
};

} // namespace rnsa
