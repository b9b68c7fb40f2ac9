#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selfisbi {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The explicit Euler recurrence produced a non-finite population.
class SolverDivergence : public Error {
public:
    SolverDivergence(std::size_t step, const std::string& what)
        : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class IncompatibleData : public Error {
public:
    using Error::Error;
};

/// A symmetric positive-definite factorization failed.
class SingularMatrix : public Error {
public:
    SingularMatrix(const std::string& what, double smallest_eigenvalue)
        : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}
    double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

private:
    double smallest_eigenvalue_;
};

/// At least one simulation of an ensemble group failed; the group is unusable.
class EnsembleFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Missing artifact or checksum mismatch on load.
class ArtifactError : public Error {
public:
    using Error::Error;
};

class InternalInvariant : public Error {
public:
    using Error::Error;
};

}  // namespace selfisbi
