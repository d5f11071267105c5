#pragma once

#include <stdexcept>
#include <string>

namespace phcbi {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operand shapes are inconsistent with the declared dimensions.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// J fails the skew-symmetry check ||J + J^T|| <= tol.
class SkewViolation : public Error {
public:
    using Error::Error;
};

/// R fails the symmetry check ||R - R^T|| <= tol.
class SymViolation : public Error {
public:
    using Error::Error;
};

/// A matrix expected to be symmetric is not.
class NotSymmetric : public Error {
public:
    using Error::Error;
};

/// Plant and controller port dimensions differ.
class PortMismatch : public Error {
public:
    using Error::Error;
};

/// (J - R) Q is singular; no isolated equilibrium.
class SingularDynamics : public Error {
public:
    using Error::Error;
};

/// J - R is singular; the gradient-field interpretation is unavailable.
class SingularJR : public Error {
public:
    using Error::Error;
};

/// Closed-loop matrix A is singular; no isolated equilibrium to decompose around.
class SingularA : public Error {
public:
    using Error::Error;
};

/// Target Hessian W is singular.
class SingularW : public Error {
public:
    using Error::Error;
};

/// State left the overflow guard during integration.
class NonFinite : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied parameter value.
class BadParam : public Error {
public:
    using Error::Error;
};

/// The equilibrium-selection denominator vanishes for these controller gains.
class DegenerateAlpha : public Error {
public:
    using Error::Error;
};

} // namespace phcbi
