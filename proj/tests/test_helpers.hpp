#pragma once

// Seeded random model generators shared by the property tests. Every
// generator takes the engine by reference so a test controls its own
// sequence and stays reproducible.

#include <phcbi/phcbi.hpp>

#include <random>

namespace phcbi_test {

using phcbi::MatrixXd;
using phcbi::VectorXd;

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline MatrixXd random_matrix(std::mt19937& rng, Eigen::Index rows, Eigen::Index cols,
                              double scale = 1.0) {
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, -scale, scale);
    return m;
}

inline VectorXd random_vector(std::mt19937& rng, Eigen::Index n, double scale = 1.0) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng, -scale, scale);
    return v;
}

inline MatrixXd random_skew(std::mt19937& rng, Eigen::Index n) {
    const MatrixXd a = random_matrix(rng, n, n);
    return a - a.transpose();
}

inline MatrixXd random_sym(std::mt19937& rng, Eigen::Index n) {
    const MatrixXd a = random_matrix(rng, n, n);
    return a + a.transpose();
}

inline MatrixXd random_psd(std::mt19937& rng, Eigen::Index n) {
    const MatrixXd a = random_matrix(rng, n, n);
    return a * a.transpose();
}

/// Random valid system; R is positive semidefinite when `passive`,
/// sign-indefinite otherwise.
inline phcbi::LtiPhSystem random_system(std::mt19937& rng, Eigen::Index n, Eigen::Index m,
                                        bool passive) {
    const MatrixXd J = random_skew(rng, n);
    const MatrixXd R = passive ? random_psd(rng, n) : random_sym(rng, n);
    const MatrixXd G = random_matrix(rng, n, m);
    const phcbi::QuadraticHamiltonian ham(random_sym(rng, n), random_vector(rng, n), 0.0);
    return phcbi::validate_structure(J, R, G, ham);
}

/// Random system whose J + R is comfortably invertible, for tests that
/// need the exact Casimir branch.
inline phcbi::LtiPhSystem random_invertible_system(std::mt19937& rng, Eigen::Index n,
                                                   Eigen::Index m, bool passive) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        phcbi::LtiPhSystem sys = random_system(rng, n, m, passive);
        if (phcbi::rcond_estimate(sys.J + sys.R) >= 1e-6) return sys;
    }
    throw std::runtime_error("failed to draw an invertible J + R");
}

}  // namespace phcbi_test
