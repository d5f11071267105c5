#pragma once

#include <Eigen/Dense>

#include "phcbi/errors.hpp"
#include "phcbi/numerics.hpp"

namespace phcbi {

/// Quadratic-affine energy function H(x) = 1/2 x^T Q x + b^T x + c0
/// with gradient Q x + b. Q is kept exactly symmetric; asymmetry beyond
/// the tolerance band is a construction error.
class QuadraticHamiltonian {
public:
    QuadraticHamiltonian() = default;

    QuadraticHamiltonian(MatrixXd Q, VectorXd b, double c0 = 0.0,
                         double sym_tol = Tolerances{}.sym)
        : Q_(std::move(Q)), b_(std::move(b)), c0_(c0) {
        if (Q_.rows() != Q_.cols())
            throw DimensionMismatch("QuadraticHamiltonian: Q must be square");
        if (b_.size() != Q_.rows())
            throw DimensionMismatch("QuadraticHamiltonian: b must have Q's dimension");
        if (!is_symmetric(Q_, sym_tol))
            throw NotSymmetric("QuadraticHamiltonian: Q is not symmetric, defect " +
                               std::to_string(sym_defect(Q_)));
        Q_ = symmetrize(Q_);
    }

    /// H == 0 in dimension n.
    [[nodiscard]] static QuadraticHamiltonian zero(Eigen::Index n) {
        return QuadraticHamiltonian(MatrixXd::Zero(n, n), VectorXd::Zero(n), 0.0);
    }

    [[nodiscard]] Eigen::Index dim() const { return Q_.rows(); }
    [[nodiscard]] const MatrixXd& Q() const { return Q_; }
    [[nodiscard]] const VectorXd& b() const { return b_; }
    [[nodiscard]] double c0() const { return c0_; }

    [[nodiscard]] double value(const VectorXd& x) const {
        check_dim(x);
        return 0.5 * x.dot(Q_ * x) + b_.dot(x) + c0_;
    }

    [[nodiscard]] VectorXd gradient(const VectorXd& x) const {
        check_dim(x);
        return Q_ * x + b_;
    }

    /// Direct sum: block-diagonal curvature, stacked linear terms.
    [[nodiscard]] QuadraticHamiltonian direct_sum(const QuadraticHamiltonian& other) const {
        const Eigen::Index n1 = dim(), n2 = other.dim();
        MatrixXd Q = MatrixXd::Zero(n1 + n2, n1 + n2);
        Q.topLeftCorner(n1, n1) = Q_;
        Q.bottomRightCorner(n2, n2) = other.Q_;
        VectorXd b(n1 + n2);
        b << b_, other.b_;
        return QuadraticHamiltonian(std::move(Q), std::move(b), c0_ + other.c0_);
    }

private:
    void check_dim(const VectorXd& x) const {
        if (x.size() != dim())
            throw DimensionMismatch("QuadraticHamiltonian: state has wrong dimension");
    }

    MatrixXd Q_{MatrixXd::Zero(0, 0)};
    VectorXd b_{VectorXd::Zero(0)};
    double c0_ = 0.0;
};

} // namespace phcbi
