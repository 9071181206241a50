#pragma once
#include <stdexcept>
#include <string>

namespace volterra {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// argument outside the analytic domain of an operation
struct DomainError : Error {
    using Error::Error;
};

// a denominator of the form 1 + mu*a(lambda) or similar vanished
struct PoleError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct AccuracyError : Error {
    AccuracyError(const std::string& what, double achieved)
        : Error(what + " (achieved error " + std::to_string(achieved) + ")"), achieved_error(achieved) {}
    double achieved_error;
};

struct UnsupportedKernel : Error {
    using Error::Error;
};

// system data that makes a requested analysis meaningless (unreachable modes, excluded modes)
struct StructuralError : Error {
    using Error::Error;
};

// config / schema errors; path names the offending field
struct ConfigError : Error {
    ConfigError(const std::string& path_, const std::string& msg)
        : Error(path_ + ": " + msg), path(path_) {}
    std::string path;
};

}  // namespace volterra
