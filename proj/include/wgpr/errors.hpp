#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wgpr {

// Error categories used across the library. The CLI maps these onto
// process exit codes, so every throw site picks the kind deliberately.
enum class ErrorKind {
    InvalidInput,      // caller violated a precondition (bad dimensions, non-finite data, ...)
    NumericalFailure,  // factorization / iteration failed beyond recovery
    RangeError,        // requested value outside an attainable range
    DegenerateWarp,    // warp derivative vanished where it must not
    DataError,         // file / schema / domain problems in dataset handling
    FitFailure         // every optimization restart failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

struct NumericalFailureError : Error {
    NumericalFailureError(const std::string& what, double attempted_jitter = 0.0)
        : Error(ErrorKind::NumericalFailure, what), attempted_jitter(attempted_jitter) {}
    double attempted_jitter;
};

struct RangeErrorW : Error {
    explicit RangeErrorW(const std::string& what) : Error(ErrorKind::RangeError, what) {}
};

struct DegenerateWarpError : Error {
    explicit DegenerateWarpError(const std::string& what) : Error(ErrorKind::DegenerateWarp, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::DataError, what) {}
};

struct FitFailureError : Error {
    FitFailureError(const std::string& what, std::vector<std::string> diagnostics)
        : Error(ErrorKind::FitFailure, what), per_restart(std::move(diagnostics)) {}
    std::vector<std::string> per_restart;
};

}  // namespace wgpr
