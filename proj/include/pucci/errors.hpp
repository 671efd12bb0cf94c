#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pucci {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input (bad matrix, bad ellipticity, bad params).
class InputError : public Error {
public:
    using Error::Error;
};

/// Radial integration blew up.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// No bracket for the requested eigenvalue could be found.
class NoEigenvalueFound : public Error {
public:
    using Error::Error;
};

/// Grid construction failed (no interior nodes, bad spacing).
class GridError : public Error {
public:
    using Error::Error;
};

/// A nonlinear or linear solver did not converge.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Inverse power iteration did not tighten its eigenvalue bracket.
class EigenError : public Error {
public:
    using Error::Error;
};

/// Operation requires a symmetry the domain does not have.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Shooting found no amplitude bracket for the semilinear problem.
class NoSolutionFound : public Error {
public:
    using Error::Error;
};

}  // namespace pucci

namespace pucci {

/// Configuration problems; `issues` lists every offending key or line.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

}  // namespace pucci
