#pragma once

#include <Eigen/Dense>

#include <string>

#include "phcbi/casimir.hpp"
#include "phcbi/errors.hpp"
#include "phcbi/hamiltonian.hpp"
#include "phcbi/system.hpp"

namespace phcbi {

/// Plant-state dynamics restricted to the invariant leaf xi = K^T x + kappa:
/// x' = A x + c.
struct AffineDynamics {
    MatrixXd A;
    VectorXd c;
};

/// Eliminate the controller state along the Casimir leaf. With
/// grad Hc(xi) = A1 xi + a2 and G Gc^T = -(J + R) K,
///
///   A = (J - R) Q + (J + R) K A1 K^T
///   c = (J - R) b + (J + R) K (A1 kappa + a2).
[[nodiscard]] inline AffineDynamics closed_loop_plant_affine(const LtiPhSystem& plant,
                                                             const CasimirSolution& sol,
                                                             const QuadraticHamiltonian& hc) {
    if (hc.dim() != sol.nc())
        throw DimensionMismatch("closed_loop_plant_affine: Hc dimension must equal n_c");
    if (sol.K.rows() != plant.n)
        throw DimensionMismatch("closed_loop_plant_affine: K must have n rows");
    const MatrixXd JmR = plant.J - plant.R;
    const MatrixXd JpRK = (plant.J + plant.R) * sol.K;
    AffineDynamics cl;
    cl.A = JmR * plant.ham.Q() + JpRK * hc.Q() * sol.K.transpose();
    cl.c = JmR * plant.ham.b() + JpRK * (hc.Q() * sol.kappa + hc.b());
    return cl;
}

/// Gradient of the shaped energy Hd = H + Hc composed with the leaf map,
/// pulled back to plant coordinates:
///
///   grad Hd(x) = grad H(x) + (J - R)^{-1} (J + R) K grad Hc(K^T x + kappa).
///
/// Requires J - R invertible (equivalently J + R; their determinants agree
/// up to sign).
[[nodiscard]] inline VectorXd es_gradient(const LtiPhSystem& plant, const CasimirSolution& sol,
                                          const QuadraticHamiltonian& hc, const VectorXd& x,
                                          const Tolerances& tol = {}) {
    if (x.size() != plant.n)
        throw DimensionMismatch("es_gradient: x must have n entries");
    if (hc.dim() != sol.nc())
        throw DimensionMismatch("es_gradient: Hc dimension must equal n_c");
    Eigen::FullPivLU<MatrixXd> lu(plant.J - plant.R);
    if (rcond_of(lu) < tol.rcond_min)
        throw SingularJR("es_gradient: J - R is numerically singular");
    const VectorXd xi = sol.K.transpose() * x + sol.kappa;
    return plant.ham.gradient(x) + lu.solve((plant.J + plant.R) * sol.K * hc.gradient(xi));
}

/// Integrability probe for the pulled-back gradient field. The candidate
/// Hessian
///
///   M = Q + (J - R)^{-1} (J + R) K A1 K^T
///
/// is the Jacobian of grad Hd; the field is a gradient iff M is symmetric.
struct PoincareReport {
    MatrixXd M;
    double asym_defect = 0.0; ///< ||M - M^T||
    bool integrable = false;
    double tol_used = 0.0;
};

[[nodiscard]] inline PoincareReport poincare_check(const LtiPhSystem& plant,
                                                   const CasimirSolution& sol,
                                                   const QuadraticHamiltonian& hc,
                                                   const Tolerances& tol = {}) {
    if (hc.dim() != sol.nc())
        throw DimensionMismatch("poincare_check: Hc dimension must equal n_c");
    Eigen::FullPivLU<MatrixXd> lu(plant.J - plant.R);
    if (rcond_of(lu) < tol.rcond_min)
        throw SingularJR("poincare_check: J - R is numerically singular");
    PoincareReport rep;
    rep.M = plant.ham.Q() + lu.solve((plant.J + plant.R) * sol.K * hc.Q() * sol.K.transpose());
    rep.asym_defect = sym_defect(rep.M);
    rep.tol_used = sym_band(rep.M, tol.sym);
    rep.integrable = rep.asym_defect <= rep.tol_used;
    return rep;
}

/// Result of factoring closed-loop dynamics x' = A x + c into
/// port-Hamiltonian form (Jd - Rd) W (x - x_bar): structure matrices, the
/// shaped Hessian, the equilibrium, and the verdicts the stability test
/// consumes.
struct ShapedDynamics {
    MatrixXd Jd;            ///< skew
    MatrixXd Rd;            ///< symmetric; Jd - Rd = A W^{-1} exactly
    MatrixXd W;             ///< shaped Hessian used for the factorization
    VectorXd x_bar;         ///< equilibrium -A^{-1} c
    double match_residual = 0.0;
    DefinitenessVerdict rd_verdict;      ///< of Rd
    DefinitenessVerdict hessian_verdict; ///< of W
};

/// Factor x' = A x + c as (Jd - Rd) W (x - x_bar) for a prescribed
/// symmetric Hessian W:
///
///   F = A W^{-1},  Jd = (F - F^T)/2,  Rd = -(F + F^T)/2,  x_bar = -A^{-1} c.
///
/// match_residual probes the identity at x_bar and x_bar +/- e_i.
[[nodiscard]] inline ShapedDynamics ida_decompose(const MatrixXd& A, const VectorXd& c,
                                                  const MatrixXd& W, const Tolerances& tol = {}) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n)
        throw DimensionMismatch("ida_decompose: A must be square");
    if (c.size() != n)
        throw DimensionMismatch("ida_decompose: c must have n entries");
    if (W.rows() != n || W.cols() != n)
        throw DimensionMismatch("ida_decompose: W must be n x n");
    if (sym_defect(W) > sym_band(W, tol.sym))
        throw NotSymmetric("ida_decompose: W must be symmetric");
    const MatrixXd Ws = symmetrize(W);

    Eigen::FullPivLU<MatrixXd> luW(Ws);
    if (rcond_of(luW) < tol.rcond_min)
        throw SingularW("ida_decompose: W is numerically singular");
    Eigen::FullPivLU<MatrixXd> luA(A);
    if (rcond_of(luA) < tol.rcond_min)
        throw SingularA("ida_decompose: A is numerically singular");

    // F = A W^{-1}, computed as (W^{-1} A^T)^T with W symmetric
    const MatrixXd F = luW.solve(A.transpose()).transpose();

    ShapedDynamics sd;
    sd.Jd = antisymmetrize(F);
    sd.Rd = symmetrize(-0.5 * (F + F.transpose()));
    sd.W = Ws;
    sd.x_bar = luA.solve(-c);

    const MatrixXd JmRd = sd.Jd - sd.Rd;
    double worst = 0.0;
    auto probe = [&](const VectorXd& x) {
        const VectorXd lhs = JmRd * (Ws * (x - sd.x_bar));
        const VectorXd rhs = A * x + c;
        worst = std::max(worst, inf_norm(VectorXd(lhs - rhs)));
    };
    probe(sd.x_bar);
    for (Eigen::Index i = 0; i < n; ++i) {
        VectorXd e = VectorXd::Zero(n);
        e(i) = 1.0;
        probe(sd.x_bar + e);
        probe(sd.x_bar - e);
    }
    sd.match_residual = worst;

    sd.rd_verdict = definiteness(sd.Rd, tol.definiteness);
    sd.hessian_verdict = definiteness(Ws, tol.definiteness);
    return sd;
}

/// Energy-shaping route: take W as the symmetric part of the integrability
/// Hessian M and factor the closed loop against it. When M is symmetric
/// and J - R invertible this recovers Jd = J, Rd = R since (J - R) M = A.
[[nodiscard]] inline ShapedDynamics energy_shaping(const LtiPhSystem& plant,
                                                   const CasimirSolution& sol,
                                                   const QuadraticHamiltonian& hc,
                                                   const Tolerances& tol = {}) {
    const PoincareReport poin = poincare_check(plant, sol, hc, tol);
    const AffineDynamics cl = closed_loop_plant_affine(plant, sol, hc);
    return ida_decompose(cl.A, cl.c, symmetrize(poin.M), tol);
}

/// Lyapunov-style conclusion: x_bar is declared stable when the shaped
/// Hessian is positive-definite and Rd is at least positive-semidefinite.
struct StabilityVerdict {
    bool stable_declared = false;
    DefinitenessVerdict hessian;
    DefinitenessVerdict rd;
    std::string reason;
};

[[nodiscard]] inline StabilityVerdict equilibrium_test(const ShapedDynamics& sd) {
    StabilityVerdict v;
    v.hessian = sd.hessian_verdict;
    v.rd = sd.rd_verdict;
    const bool hess_pd = v.hessian.classification == Definiteness::PositiveDefinite;
    const bool rd_ok = v.rd.classification == Definiteness::PositiveDefinite ||
                       v.rd.classification == Definiteness::PositiveSemidefinite;
    v.stable_declared = hess_pd && rd_ok;
    if (v.stable_declared) {
        v.reason = "shaped Hessian positive-definite and Rd positive-semidefinite";
    } else if (!hess_pd) {
        v.reason = std::string("shaped Hessian is ") + to_string(v.hessian.classification);
    } else {
        v.reason = std::string("Rd is ") + to_string(v.rd.classification);
    }
    return v;
}

/// Controller state pinned by the Casimir leaf at a plant equilibrium.
[[nodiscard]] inline VectorXd controller_equilibrium(const CasimirSolution& sol,
                                                     const VectorXd& x_star) {
    if (x_star.size() != sol.K.rows())
        throw DimensionMismatch("controller_equilibrium: x_star must have n entries");
    return sol.K.transpose() * x_star + sol.kappa;
}

} // namespace phcbi
