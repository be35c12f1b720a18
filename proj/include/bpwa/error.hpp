#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bpwa {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments or malformed input files.
class InputError : public Error {
public:
    using Error::Error;
};

// Non-finite state met during integration.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(what + " (t=" + std::to_string(time) + ")"), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

// Radiation damping not positive where a wave force is requested.
class KernelValidityError : public Error {
public:
    using Error::Error;
};

class NotBistableError : public Error {
public:
    using Error::Error;
};

// Requested ERA order exceeds the numerical rank of the Hankel matrix.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, std::vector<double> singular_values)
        : Error(what), singular_values_(std::move(singular_values)) {}
    const std::vector<double>& singular_values() const { return singular_values_; }

private:
    std::vector<double> singular_values_;
};

class LogBranchError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace bpwa
