#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>

#include "phcbi/errors.hpp"
#include "phcbi/system.hpp"

namespace phcbi {

/// Casimir candidate for an LTI plant: the linear map S(x) = K^T x sought
/// so that C(x, xi) = xi - S(x) is conserved by the interconnected loop,
/// together with the controller structure it induces.
///
/// The structure relations hold by construction:
///   Rc = -K^T R K,   Jc = K^T J K,
/// while the residuals report how well K actually solves the matrix
/// equations
///   (PDE1)  K^T (J - R) - Gc G^T        = 0
///   (PDE2)  K^T G Gc^T  + (Jc - Rc)     = 0.
struct CasimirSolution {
    MatrixXd K;       ///< n x n_c gradient of S
    MatrixXd Gc;      ///< n_c x m controller port gain
    VectorXd kappa;   ///< n_c Casimir levels
    MatrixXd Jc;      ///< n_c x n_c induced interconnection (skew)
    MatrixXd Rc;      ///< n_c x n_c induced resistive structure (symmetric, often <= 0)
    double residual_pde1 = 0.0;
    double residual_pde2 = 0.0;
    bool exact = true; ///< false when residual_pde1 exceeds the chain band

    [[nodiscard]] Eigen::Index nc() const { return K.cols(); }
};

/// Controller structure induced by a Casimir gradient K:
/// Rc = -K^T R K and Jc = K^T J K, with round-off (anti)symmetrized away.
[[nodiscard]] inline std::pair<MatrixXd, MatrixXd> induced_structure(const LtiPhSystem& plant,
                                                                     const MatrixXd& K) {
    if (K.rows() != plant.n)
        throw DimensionMismatch("induced_structure: K must have n rows");
    MatrixXd Jc = antisymmetrize(K.transpose() * plant.J * K);
    MatrixXd Rc = symmetrize(-K.transpose() * plant.R * K);
    return {std::move(Jc), std::move(Rc)};
}

/// Assemble a CasimirSolution from a given gradient K: induced structure
/// plus both PDE residuals. Used by solve_casimir and by hand-forced K
/// candidates in diagnostics.
[[nodiscard]] inline CasimirSolution casimir_from_gradient(const LtiPhSystem& plant,
                                                           const MatrixXd& K, const MatrixXd& Gc,
                                                           const VectorXd& kappa,
                                                           const Tolerances& tol = {}) {
    const Eigen::Index nc = K.cols();
    if (K.rows() != plant.n)
        throw DimensionMismatch("casimir_from_gradient: K must have n rows");
    if (Gc.rows() != nc || Gc.cols() != plant.m)
        throw DimensionMismatch("casimir_from_gradient: Gc must be n_c x m");
    if (kappa.size() != nc)
        throw DimensionMismatch("casimir_from_gradient: kappa must have n_c entries");

    CasimirSolution sol;
    sol.K = K;
    sol.Gc = Gc;
    sol.kappa = kappa;
    std::tie(sol.Jc, sol.Rc) = induced_structure(plant, K);
    sol.residual_pde1 =
        inf_norm(MatrixXd(K.transpose() * (plant.J - plant.R) - Gc * plant.G.transpose()));
    sol.residual_pde2 =
        inf_norm(MatrixXd(K.transpose() * plant.G * Gc.transpose() + (sol.Jc - sol.Rc)));
    const double band = tol.chain * (1.0 + inf_norm(plant.J) + inf_norm(plant.R));
    sol.exact = sol.residual_pde1 <= band;
    return sol;
}

/// Solve the Casimir matrix equation for an LTI plant with fixed port gain
/// Gc: in transposed form, G Gc^T = -(J + R) K, so
///
///   K = -(J + R)^{-1} G Gc^T.
///
/// When J + R is singular the minimum-norm least-squares K is returned and
/// the defect shows up in residual_pde1 (exact = false).
[[nodiscard]] inline CasimirSolution solve_casimir(const LtiPhSystem& plant, const MatrixXd& Gc,
                                                   const VectorXd& kappa,
                                                   const Tolerances& tol = {}) {
    if (Gc.cols() != plant.m)
        throw DimensionMismatch("solve_casimir: Gc must have m columns");
    const Eigen::Index nc = Gc.rows();
    if (kappa.size() != nc)
        throw DimensionMismatch("solve_casimir: kappa must have n_c entries");

    const MatrixXd JpR = plant.J + plant.R;
    const MatrixXd rhs = -plant.G * Gc.transpose(); // n x n_c

    MatrixXd K;
    Eigen::FullPivLU<MatrixXd> lu(JpR);
    if (plant.n > 0 && rcond_of(lu) >= tol.rcond_min) {
        K = lu.solve(rhs);
    } else {
        // minimum-norm least-squares fallback; residuals surface the defect
        K = JpR.completeOrthogonalDecomposition().solve(rhs);
    }
    return casimir_from_gradient(plant, K, Gc, kappa, tol);
}

/// Scalar-port convenience: n_c = m = 1.
[[nodiscard]] inline CasimirSolution solve_casimir(const LtiPhSystem& plant, double Gc,
                                                   double kappa = 0.0,
                                                   const Tolerances& tol = {}) {
    MatrixXd Gcm(1, 1);
    Gcm(0, 0) = Gc;
    VectorXd kv(1);
    kv(0) = kappa;
    return solve_casimir(plant, Gcm, kv, tol);
}

enum class ObstacleClass { Classical, BeyondObstacle };

[[nodiscard]] inline const char* to_string(ObstacleClass c) {
    return c == ObstacleClass::Classical ? "classical" : "beyond-obstacle";
}

/// Where a solution stands relative to the classical Casimir chain
///
///   K^T J K = Jc,   R K = 0,   Rc = 0,   J K = -G Gc^T.
///
/// The second equality is the dissipation obstacle; a solution that
/// violates any of the four while still solving the matrix equations is
/// classified beyond-obstacle.
struct ObstacleReport {
    double norm_RK = 0.0;          ///< ||R K||
    double norm_Rc = 0.0;          ///< ||Rc||
    double norm_JK_plus_GGc = 0.0; ///< ||J K + G Gc^T||
    double norm_Jc_match = 0.0;    ///< ||K^T J K - Jc||
    bool classical_chain_holds = false;
    ObstacleClass classification = ObstacleClass::BeyondObstacle;
    double chain_tol_used = 0.0;
};

[[nodiscard]] inline ObstacleReport obstacle_check(const LtiPhSystem& plant,
                                                   const CasimirSolution& sol,
                                                   const Tolerances& tol = {}) {
    ObstacleReport rep;
    rep.norm_RK = inf_norm(MatrixXd(plant.R * sol.K));
    rep.norm_Rc = inf_norm(sol.Rc);
    rep.norm_JK_plus_GGc = inf_norm(MatrixXd(plant.J * sol.K + plant.G * sol.Gc.transpose()));
    rep.norm_Jc_match = inf_norm(MatrixXd(sol.K.transpose() * plant.J * sol.K - sol.Jc));
    rep.chain_tol_used = tol.chain * (1.0 + inf_norm(plant.J) + inf_norm(plant.R));
    rep.classical_chain_holds = rep.norm_RK <= rep.chain_tol_used &&
                                rep.norm_Rc <= rep.chain_tol_used &&
                                rep.norm_JK_plus_GGc <= rep.chain_tol_used &&
                                rep.norm_Jc_match <= rep.chain_tol_used;
    rep.classification =
        rep.classical_chain_holds ? ObstacleClass::Classical : ObstacleClass::BeyondObstacle;
    return rep;
}

/// Materialize the controller system (Jc, Rc, Gc, Hc) from a solution.
/// Its `passive` verdict typically comes out indefinite or negative here;
/// that is the point, not a defect.
[[nodiscard]] inline LtiPhSystem build_controller(const CasimirSolution& sol,
                                                  const QuadraticHamiltonian& hc,
                                                  const Tolerances& tol = {}) {
    if (hc.dim() != sol.nc())
        throw DimensionMismatch("build_controller: Hc dimension must equal n_c");
    return validate_structure(sol.Jc, sol.Rc, sol.Gc, hc, tol);
}

} // namespace phcbi
