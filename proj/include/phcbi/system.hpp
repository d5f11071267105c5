#pragma once

#include <Eigen/Dense>

#include <utility>

#include "phcbi/errors.hpp"
#include "phcbi/hamiltonian.hpp"
#include "phcbi/numerics.hpp"

namespace phcbi {

/// Constant-matrix port-Hamiltonian system
///
///   xdot = (J - R) grad H(x) + G u,    y = G^T grad H(x)
///
/// with J skew-symmetric, R symmetric, and quadratic-affine H. R is NOT
/// required to be positive semi-definite: controllers may carry an
/// indefinite or negative resistive structure, and `passive` records the
/// definiteness verdict instead of constraining it.
struct LtiPhSystem {
    Eigen::Index n = 0; ///< state dimension
    Eigen::Index m = 0; ///< port dimension
    MatrixXd J;         ///< interconnection structure, n x n skew
    MatrixXd R;         ///< resistive structure, n x n symmetric
    MatrixXd G;         ///< input map, n x m
    QuadraticHamiltonian ham;
    DefinitenessVerdict passive; ///< verdict on R; passive iff R >= 0

    [[nodiscard]] bool is_passive() const { return passive.nonneg(); }
};

/// Validate (J, R, G, H) as a pH structure and build the system value.
/// J and R are (anti)symmetrized after the check so downstream algebra
/// sees exact structure.
[[nodiscard]] inline LtiPhSystem validate_structure(const MatrixXd& J, const MatrixXd& R,
                                                    const MatrixXd& G,
                                                    const QuadraticHamiltonian& ham,
                                                    const Tolerances& tol = {}) {
    const Eigen::Index n = J.rows();
    if (J.cols() != n) throw DimensionMismatch("validate_structure: J must be square");
    if (R.rows() != n || R.cols() != n)
        throw DimensionMismatch("validate_structure: R must be n x n");
    if (G.rows() != n) throw DimensionMismatch("validate_structure: G must have n rows");
    if (ham.dim() != n)
        throw DimensionMismatch("validate_structure: Hamiltonian dimension must equal n");

    if (!is_skew(J, tol.sym))
        throw SkewViolation("validate_structure: J is not skew-symmetric, defect " +
                            std::to_string(skew_defect(J)));
    if (!is_symmetric(R, tol.sym))
        throw SymViolation("validate_structure: R is not symmetric, defect " +
                           std::to_string(sym_defect(R)));

    LtiPhSystem sys;
    sys.n = n;
    sys.m = G.cols();
    sys.J = antisymmetrize(J);
    sys.R = symmetrize(R);
    sys.G = G;
    sys.ham = ham;
    sys.passive = definiteness(sys.R, tol.definiteness);
    return sys;
}

/// xdot = (J - R)(Q x + b) + G u.
[[nodiscard]] inline VectorXd vector_field(const LtiPhSystem& sys, const VectorXd& x,
                                           const VectorXd& u) {
    if (x.size() != sys.n) throw DimensionMismatch("vector_field: state has wrong dimension");
    if (u.size() != sys.m) throw DimensionMismatch("vector_field: input has wrong dimension");
    VectorXd xdot = (sys.J - sys.R) * sys.ham.gradient(x);
    if (sys.m > 0) xdot += sys.G * u;
    return xdot;
}

/// y = G^T (Q x + b).
[[nodiscard]] inline VectorXd output(const LtiPhSystem& sys, const VectorXd& x) {
    if (x.size() != sys.n) throw DimensionMismatch("output: state has wrong dimension");
    return sys.G.transpose() * sys.ham.gradient(x);
}

/// Solve (J - R)(Q x* + b) + G u* = 0 for the equilibrium x*.
/// Requires (J - R) Q nonsingular (isolated equilibrium).
[[nodiscard]] inline VectorXd equilibrium_for_input(const LtiPhSystem& sys, const VectorXd& u_star,
                                                    const Tolerances& tol = {}) {
    if (u_star.size() != sys.m)
        throw DimensionMismatch("equilibrium_for_input: input has wrong dimension");
    const MatrixXd JR = sys.J - sys.R;
    const MatrixXd A = JR * sys.ham.Q();
    Eigen::FullPivLU<MatrixXd> lu(A);
    const double rc = rcond_of(lu);
    if (rc < tol.rcond_min)
        throw SingularDynamics("equilibrium_for_input: (J-R)Q is singular, rcond " +
                               std::to_string(rc));
    VectorXd rhs = -(JR * sys.ham.b());
    if (sys.m > 0) rhs -= sys.G * u_star;
    return lu.solve(rhs);
}

/// Power-preserving feedback interconnection u = -y_c, u_c = y.
/// Returns the autonomous (n + n_c)-state pH system with
///
///   Jcl = [ J         -G Gc^T ]      Rcl = blkdiag(R, Rc),   Hcl = H + Hc,
///         [ Gc G^T     Jc     ]
///
/// and an empty input map (zero port columns).
[[nodiscard]] inline LtiPhSystem feedback_interconnect(const LtiPhSystem& plant,
                                                       const LtiPhSystem& ctrl,
                                                       const Tolerances& tol = {}) {
    if (plant.m != ctrl.m)
        throw PortMismatch("feedback_interconnect: port dimensions differ (" +
                           std::to_string(plant.m) + " vs " + std::to_string(ctrl.m) + ")");
    const Eigen::Index n = plant.n, nc = ctrl.n;
    MatrixXd Jcl = MatrixXd::Zero(n + nc, n + nc);
    Jcl.topLeftCorner(n, n) = plant.J;
    Jcl.topRightCorner(n, nc) = -plant.G * ctrl.G.transpose();
    Jcl.bottomLeftCorner(nc, n) = ctrl.G * plant.G.transpose();
    Jcl.bottomRightCorner(nc, nc) = ctrl.J;

    MatrixXd Rcl = MatrixXd::Zero(n + nc, n + nc);
    Rcl.topLeftCorner(n, n) = plant.R;
    Rcl.bottomRightCorner(nc, nc) = ctrl.R;

    return validate_structure(Jcl, Rcl, MatrixXd::Zero(n + nc, 0),
                              plant.ham.direct_sum(ctrl.ham), tol);
}

} // namespace phcbi
