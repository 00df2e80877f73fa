#pragma once

#include <stdexcept>
#include <string>

namespace degennes {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid discretization or run parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Parameter outside the mathematical domain of an operator family.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Eigensolver breakdown or too few trustworthy eigenpairs.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Minimization interval does not bracket an interior minimum.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Spectral gap too small to certify a separating annulus.
class CertificationError : public Error {
public:
    using Error::Error;
};

/// Resolvent evaluated (numerically) on the spectrum.
class NearSingularError : public Error {
public:
    using Error::Error;
};

/// Contour quadrature failure or projection of unexpected rank.
class ContourError : public Error {
public:
    using Error::Error;
};

class RankError : public ContourError {
public:
    using ContourError::ContourError;
};

/// Bilinear overlap of the projected reference vector fell below the
/// threshold required for the quotient formula.
class StripExceededError : public Error {
public:
    using Error::Error;
};

/// Quotient and direct eigenvalue routes disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace degennes
