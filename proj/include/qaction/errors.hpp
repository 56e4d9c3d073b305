// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by all qaction modules.

#pragma once

#include <stdexcept>
#include <string>

namespace qaction {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions are inconsistent or exceed the dense backend limit.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An operator expected to be Hermitian is not, beyond the soft tolerance.
class HermiticityError : public Error {
public:
    using Error::Error;
};

/// Factorization does not match the operator, or the bipartition is degenerate.
class FactorizationError : public Error {
public:
    using Error::Error;
};

/// Dephasing basis is incomplete or not orthogonal.
class BasisError : public Error {
public:
    using Error::Error;
};

/// Eigendecomposition or matrix exponential failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The pulled-back metric is not invertible at the requested point.
class SingularMetricError : public Error {
public:
    using Error::Error;
};

/// Solver preconditions violated or no admissible solution found.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Malformed problem configuration; carries the offending field path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace qaction
