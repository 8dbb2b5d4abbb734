// errors.hpp: exception hierarchy shared by the library and the CLI.
//
// ConfigError        invalid or unparsable parameters        (CLI exit 2)
// SolverError        numerical failure inside an algorithm   (CLI exit 3)
// PreconditionError  caller asked for an ill-posed evaluation (CLI exit 4)

#pragma once

#include <stdexcept>
#include <string>

namespace topobatt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

/// A double pole whose numerator does not vanish: the secular (t e^{-izt})
/// term would be nonzero, which the two-emitter model cannot produce.
class ModelInconsistencyError : public SolverError {
public:
    using SolverError::SolverError;
};

class AccuracyError : public SolverError {
public:
    AccuracyError(const std::string& what, double estimate)
        : SolverError(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class OnSpectrumError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class LightConeError : public PreconditionError {
public:
    LightConeError(const std::string& what, int min_cells)
        : PreconditionError(what), min_cells_(min_cells) {}
    int min_cells() const noexcept { return min_cells_; }

private:
    int min_cells_;
};

} // namespace topobatt
