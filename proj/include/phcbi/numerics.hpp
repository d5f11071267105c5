#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "phcbi/errors.hpp"

namespace phcbi {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Tolerance knobs shared across the toolkit. Each entry is a relative
/// multiplier; the operations turn it into an absolute band using the
/// scale of the matrices involved.
struct Tolerances {
    double sym = 1e-9;        ///< structural checks: band = sym * (1 + ||M||_inf)
    double chain = 1e-9;      ///< obstacle chain: band = chain * (1 + ||J|| + ||R||)
    double rcond_min = 1e-12; ///< reciprocal condition estimate below this => singular
    double definiteness = 1e-9;
};

/// Induced infinity norm (max absolute row sum). Zero for empty matrices.
[[nodiscard]] inline double inf_norm(const MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

[[nodiscard]] inline double inf_norm(const VectorXd& v) {
    if (v.size() == 0) return 0.0;
    return v.cwiseAbs().maxCoeff();
}

/// Absolute symmetry band for a matrix of this magnitude.
[[nodiscard]] inline double sym_band(const MatrixXd& m, double tol = Tolerances{}.sym) {
    return tol * (1.0 + inf_norm(m));
}

[[nodiscard]] inline double skew_defect(const MatrixXd& m) {
    return inf_norm(MatrixXd(m + m.transpose()));
}

[[nodiscard]] inline double sym_defect(const MatrixXd& m) {
    return inf_norm(MatrixXd(m - m.transpose()));
}

[[nodiscard]] inline bool is_skew(const MatrixXd& m, double tol = Tolerances{}.sym) {
    return skew_defect(m) <= sym_band(m, tol);
}

[[nodiscard]] inline bool is_symmetric(const MatrixXd& m, double tol = Tolerances{}.sym) {
    return sym_defect(m) <= sym_band(m, tol);
}

/// Exact (anti)symmetrization, used to absorb construction round-off
/// after the corresponding check has passed.
[[nodiscard]] inline MatrixXd symmetrize(const MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

[[nodiscard]] inline MatrixXd antisymmetrize(const MatrixXd& m) {
    return 0.5 * (m - m.transpose());
}

/// rcond of a decomposed square matrix. The raw L1 estimate is
/// meaningless on a rank-deficient factorization (the estimator quietly
/// works with the truncated factors and can report 1), so exact rank
/// deficiency maps to 0.
[[nodiscard]] inline double rcond_of(const Eigen::FullPivLU<MatrixXd>& lu) {
    if (lu.rank() < lu.rows()) return 0.0;
    return lu.rcond();
}

/// Reciprocal condition estimate of a square matrix (L1-based, via LU).
[[nodiscard]] inline double rcond_estimate(const MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("rcond_estimate: matrix must be square");
    if (m.size() == 0) return 1.0;
    Eigen::FullPivLU<MatrixXd> lu(m);
    return rcond_of(lu);
}

enum class Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    NegativeSemidefinite,
    NegativeDefinite,
};

[[nodiscard]] inline const char* to_string(Definiteness d) {
    switch (d) {
        case Definiteness::PositiveDefinite: return "positive-definite";
        case Definiteness::PositiveSemidefinite: return "positive-semidefinite";
        case Definiteness::Indefinite: return "indefinite";
        case Definiteness::NegativeSemidefinite: return "negative-semidefinite";
        case Definiteness::NegativeDefinite: return "negative-definite";
    }
    return "indefinite";
}

/// Spectrum-based definiteness classification of a symmetric matrix.
struct DefinitenessVerdict {
    Definiteness classification = Definiteness::PositiveSemidefinite;
    double min_eig = 0.0;
    double max_eig = 0.0;
    double tol_used = 0.0;

    /// M >= 0 within the tolerance band.
    [[nodiscard]] bool nonneg() const { return min_eig >= -tol_used; }
    /// M <= 0 within the tolerance band.
    [[nodiscard]] bool nonpos() const { return max_eig <= tol_used; }
};

/// Classify a symmetric matrix by its eigenvalue spectrum with tolerance
/// band tol * (1 + ||M||_inf). An all-zero spectrum classifies as
/// positive-semidefinite (the tie is broken toward the positive side).
[[nodiscard]] inline DefinitenessVerdict definiteness(const MatrixXd& m,
                                                      double tol = Tolerances{}.definiteness) {
    if (m.rows() != m.cols()) throw DimensionMismatch("definiteness: matrix must be square");
    if (!is_symmetric(m)) {
        throw NotSymmetric("definiteness: matrix is not symmetric, defect " +
                           std::to_string(sym_defect(m)));
    }

    DefinitenessVerdict v;
    v.tol_used = tol * (1.0 + inf_norm(m));
    if (m.size() == 0) {
        v.classification = Definiteness::PositiveSemidefinite;
        return v;
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
    v.min_eig = es.eigenvalues().minCoeff();
    v.max_eig = es.eigenvalues().maxCoeff();

    if (v.min_eig > v.tol_used) {
        v.classification = Definiteness::PositiveDefinite;
    } else if (v.min_eig >= -v.tol_used) {
        v.classification = Definiteness::PositiveSemidefinite;
    } else if (v.max_eig < -v.tol_used) {
        v.classification = Definiteness::NegativeDefinite;
    } else if (v.max_eig <= v.tol_used) {
        v.classification = Definiteness::NegativeSemidefinite;
    } else {
        v.classification = Definiteness::Indefinite;
    }
    return v;
}

} // namespace phcbi
