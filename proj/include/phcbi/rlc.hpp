#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "phcbi/casimir.hpp"
#include "phcbi/errors.hpp"
#include "phcbi/shaping.hpp"
#include "phcbi/system.hpp"

namespace phcbi {

/// Series RLC circuit driven through the resistor: flux phi on the
/// inductor, charge q on the capacitor, source voltage u_star. The
/// resistive term is active at every equilibrium with u_star != 0
/// (pervasive dissipation), which is what makes this the canonical
/// obstacle benchmark.
struct RlcParams {
    double L = 1.0;
    double C = 1.0;
    double r = 1.0;
    double u_star = 1.0;
};

inline void check_params(const RlcParams& p) {
    if (!(p.L > 0.0) || !std::isfinite(p.L)) throw BadParam("RlcParams: L must be positive");
    if (!(p.C > 0.0) || !std::isfinite(p.C)) throw BadParam("RlcParams: C must be positive");
    if (!(p.r > 0.0) || !std::isfinite(p.r)) throw BadParam("RlcParams: r must be positive");
    if (!std::isfinite(p.u_star)) throw BadParam("RlcParams: u_star must be finite");
}

/// State (phi, q):
///   J = [[0,-1],[1,0]],  R = diag(0, 1/r),  G = (1,0)^T,
///   H = phi^2/(2L) + q^2/(2C).
[[nodiscard]] inline LtiPhSystem make_rlc(const RlcParams& p, const Tolerances& tol = {}) {
    check_params(p);
    MatrixXd J(2, 2), R(2, 2), G(2, 1), Q(2, 2);
    J << 0.0, -1.0, 1.0, 0.0;
    R << 0.0, 0.0, 0.0, 1.0 / p.r;
    G << 1.0, 0.0;
    Q << 1.0 / p.L, 0.0, 0.0, 1.0 / p.C;
    return validate_structure(J, R, G, QuadraticHamiltonian(Q, VectorXd::Zero(2)), tol);
}

/// Lossless variant (R = 0): no obstacle, the classical chain holds.
[[nodiscard]] inline LtiPhSystem make_rlc_lossless(const RlcParams& p, const Tolerances& tol = {}) {
    check_params(p);
    MatrixXd J(2, 2), G(2, 1), Q(2, 2);
    J << 0.0, -1.0, 1.0, 0.0;
    G << 1.0, 0.0;
    Q << 1.0 / p.L, 0.0, 0.0, 1.0 / p.C;
    return validate_structure(J, MatrixXd::Zero(2, 2), G,
                              QuadraticHamiltonian(Q, VectorXd::Zero(2)), tol);
}

/// Closed forms for every derived quantity of the benchmark, used to
/// cross-check the generic pipeline. All follow from
///
///   S(phi, q) = Gc (q - phi/r),   K = (-Gc/r, Gc)^T
///
/// by direct substitution; the shaped structure is the factorization of
/// the closed-loop (A, c) against W = diag(1/L, 1/C).
struct RlcOracle {
    VectorXd K_expected;            ///< (-Gc/r, Gc)
    double Rc_expected = 0.0;       ///< -Gc^2/r
    double Jc_expected = 0.0;       ///< 0
    double norm_RK_expected = 0.0;  ///< |Gc|/r, the obstacle magnitude
    VectorXd x_star;                ///< (L u*/r, C u*), equilibrium under u = u*
    double xi_star = 0.0;           ///< Gc (C u* - L u*/r^2) + kappa
    MatrixXd Jd_expected;           ///< [[0, -1 - a1 Gc^2 C/2], [1 + a1 Gc^2 C/2, 0]]
    MatrixXd Rd_expected;           ///< [[-a1 Gc^2 L/r, a1 Gc^2 C/2], [a1 Gc^2 C/2, 1/r]]
    double alpha = 0.0;             ///< -r^2 (a2 + a1 kappa) Gc / (r^2 + a1 Gc^2 C r^2 - a1 Gc^2 L)
    VectorXd shaped_minimizer;      ///< (L alpha/r, C alpha)
    double asym_defect_expected = 0.0; ///< 2 |a1| Gc^2 / r
};

/// Evaluate the closed forms for controller coefficients
/// Hc(xi) = a1 xi^2/2 + a2 xi on the leaf xi = K^T x + kappa.
[[nodiscard]] inline RlcOracle rlc_oracle(const RlcParams& p, double Gc, double a1, double a2,
                                          double kappa = 0.0) {
    check_params(p);
    const double g2 = Gc * Gc;
    RlcOracle o;
    o.K_expected = VectorXd(2);
    o.K_expected << -Gc / p.r, Gc;
    o.Rc_expected = -g2 / p.r;
    o.Jc_expected = 0.0;
    o.norm_RK_expected = std::abs(Gc) / p.r;
    o.x_star = VectorXd(2);
    o.x_star << p.L * p.u_star / p.r, p.C * p.u_star;
    o.xi_star = Gc * (p.C * p.u_star - p.L * p.u_star / (p.r * p.r)) + kappa;

    o.Jd_expected = MatrixXd(2, 2);
    o.Jd_expected << 0.0, -1.0 - a1 * g2 * p.C / 2.0, 1.0 + a1 * g2 * p.C / 2.0, 0.0;
    o.Rd_expected = MatrixXd(2, 2);
    o.Rd_expected << -a1 * g2 * p.L / p.r, a1 * g2 * p.C / 2.0, a1 * g2 * p.C / 2.0, 1.0 / p.r;

    const double a2_eff = a2 + a1 * kappa;
    const double denom = p.r * p.r + a1 * g2 * p.C * p.r * p.r - a1 * g2 * p.L;
    if (std::abs(denom) <= 1e-12 * p.r * p.r)
        throw DegenerateAlpha("rlc_oracle: shaped equilibrium is not isolated (alpha denominator "
                              "vanishes)");
    o.alpha = -p.r * p.r * a2_eff * Gc / denom;
    o.shaped_minimizer = VectorXd(2);
    o.shaped_minimizer << p.L * o.alpha / p.r, p.C * o.alpha;
    o.asym_defect_expected = 2.0 * std::abs(a1) * g2 / p.r;
    return o;
}

/// One benchmark instance wired end to end: plant, Casimir solution,
/// controller system, and the oracle values the instance must reproduce.
struct RlcCase {
    RlcParams params;
    double Gc = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double kappa = 0.0;
    LtiPhSystem plant;
    QuadraticHamiltonian hc; ///< Hc(xi) = a1 xi^2/2 + a2 xi
    CasimirSolution casimir;
    LtiPhSystem controller;
    RlcOracle oracle;
    double y_c_expected = 0.0;       ///< Gc a2, controller output at grad Hc = a2
    double dyn_const_expected = 0.0; ///< (Jc - Rc) a2 = a2 Gc^2 / r, controller drift
    double dyn_input_coeff = 0.0;    ///< Gc, coefficient of u_c in xi'
};

[[nodiscard]] inline RlcCase assemble_case(const RlcParams& p, double Gc, double a1, double a2,
                                           double kappa, const Tolerances& tol) {
    RlcCase cs;
    cs.params = p;
    cs.Gc = Gc;
    cs.a1 = a1;
    cs.a2 = a2;
    cs.kappa = kappa;
    cs.plant = make_rlc(p, tol);
    MatrixXd A1(1, 1);
    A1 << a1;
    VectorXd bvec(1);
    bvec << a2;
    cs.hc = QuadraticHamiltonian(A1, bvec);
    cs.casimir = solve_casimir(cs.plant, Gc, kappa, tol);
    cs.controller = build_controller(cs.casimir, cs.hc, tol);
    cs.oracle = rlc_oracle(p, Gc, a1, a2, kappa);
    cs.y_c_expected = Gc * a2;
    cs.dyn_const_expected = a2 * Gc * Gc / p.r;
    cs.dyn_input_coeff = Gc;
    return cs;
}

/// Feedforward recovery: Gc = -u_star and Hc(xi) = xi turn the port
/// controller into the constant source, y_c = -u_star, so the loop
/// reproduces the open plant under u = u_star. The shaped minimizer is
/// the equilibrium (L u*/r, C u*).
[[nodiscard]] inline RlcCase feedforward_case(const RlcParams& p, double kappa = 0.0,
                                              const Tolerances& tol = {}) {
    return assemble_case(p, -p.u_star, 0.0, 1.0, kappa, tol);
}

/// Output-feedback shaping: quadratic Hc moves the closed-loop
/// equilibrium to (L alpha/r, C alpha) at the price of a non-integrable
/// gradient field; the IDA factorization against W = diag(1/L, 1/C)
/// produces the Jd/Rd templates in RlcOracle.
[[nodiscard]] inline RlcCase output_feedback_case(const RlcParams& p, double a1, double a2,
                                                  double Gc, double kappa = 0.0,
                                                  const Tolerances& tol = {}) {
    return assemble_case(p, Gc, a1, a2, kappa, tol);
}

} // namespace phcbi
