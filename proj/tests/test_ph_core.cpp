#include <catch2/catch_amalgamated.hpp>

#include <phcbi/phcbi.hpp>

#include "test_helpers.hpp"

using namespace phcbi;
using phcbi_test::random_matrix;
using phcbi_test::random_system;
using phcbi_test::random_sym;
using phcbi_test::random_vector;
using phcbi_test::uniform;

TEST_CASE("quadratic energy evaluates value and gradient", "[ph_core]") {
    MatrixXd Q(2, 2);
    Q << 2.0, 0.0, 0.0, 4.0;
    VectorXd b(2);
    b << 1.0, -1.0;
    const QuadraticHamiltonian ham(Q, b, 3.0);

    VectorXd x(2);
    x << 1.0, 2.0;
    CHECK(ham.value(x) == Catch::Approx(0.5 * (2.0 + 16.0) + (1.0 - 2.0) + 3.0));
    VectorXd g = ham.gradient(x);
    CHECK(g(0) == Catch::Approx(3.0));
    CHECK(g(1) == Catch::Approx(7.0));
}

TEST_CASE("quadratic energy gradient matches central differences", "[ph_core]") {
    std::mt19937 rng(101);
    const MatrixXd Q = random_sym(rng, 4);
    const VectorXd b = random_vector(rng, 4);
    const QuadraticHamiltonian ham(Q, b, 0.7);
    const VectorXd x = random_vector(rng, 4, 2.0);
    const VectorXd g = ham.gradient(x);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < 4; ++i) {
        VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fd = (ham.value(xp) - ham.value(xm)) / (2.0 * h);
        CHECK(std::abs(fd - g(i)) < 1e-7 * (1.0 + std::abs(g(i))));
    }
}

TEST_CASE("quadratic energy rejects asymmetric or mismatched data", "[ph_core]") {
    MatrixXd Q(2, 2);
    Q << 1.0, 0.3, 0.2, 1.0;
    CHECK_THROWS_AS(QuadraticHamiltonian(Q, VectorXd::Zero(2)), NotSymmetric);
    CHECK_THROWS_AS(QuadraticHamiltonian(MatrixXd::Identity(2, 2), VectorXd::Zero(3)),
                    DimensionMismatch);
}

TEST_CASE("direct sum stacks energies", "[ph_core]") {
    const QuadraticHamiltonian a(MatrixXd::Identity(2, 2), VectorXd::Zero(2), 1.0);
    MatrixXd Qb(1, 1);
    Qb << 3.0;
    VectorXd bb(1);
    bb << -2.0;
    const QuadraticHamiltonian b(Qb, bb, 0.5);
    const QuadraticHamiltonian s = a.direct_sum(b);
    REQUIRE(s.dim() == 3);
    VectorXd z(3);
    z << 1.0, 1.0, 1.0;
    VectorXd xa(2), xb(1);
    xa << 1.0, 1.0;
    xb << 1.0;
    CHECK(s.value(z) == Catch::Approx(a.value(xa) + b.value(xb)));
    CHECK(s.Q()(0, 2) == 0.0);
    CHECK(s.Q()(2, 2) == 3.0);
}

TEST_CASE("structure validation accepts the series RLC matrices", "[ph_core]") {
    const LtiPhSystem sys = make_rlc({});
    CHECK(sys.n == 2);
    CHECK(sys.m == 1);
    CHECK(sys.J(0, 1) == -1.0);
    CHECK(sys.is_passive());
    CHECK(sys.passive.classification == Definiteness::PositiveSemidefinite);
}

TEST_CASE("structure validation rejects a non-skew interconnection", "[ph_core]") {
    MatrixXd J(2, 2);
    J << 0.0, 1.0, 1.0, 0.0;
    const MatrixXd R = MatrixXd::Zero(2, 2);
    const MatrixXd G = MatrixXd::Zero(2, 1);
    const QuadraticHamiltonian ham(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
    CHECK_THROWS_AS(validate_structure(J, R, G, ham), SkewViolation);
}

TEST_CASE("structure validation admits negative resistive structure", "[ph_core]") {
    MatrixXd R(1, 1);
    R << -1.0;
    const LtiPhSystem sys = validate_structure(
        MatrixXd::Zero(1, 1), R, MatrixXd::Identity(1, 1),
        QuadraticHamiltonian(MatrixXd::Identity(1, 1), VectorXd::Zero(1)));
    CHECK_FALSE(sys.is_passive());
    CHECK(sys.passive.classification == Definiteness::NegativeDefinite);
}

TEST_CASE("vector field matches hand values on the series RLC", "[ph_core]") {
    const LtiPhSystem sys = make_rlc({});
    VectorXd x(2), u(1);
    x << 0.0, 0.0;
    u << 1.0;
    VectorXd f = vector_field(sys, x, u);
    CHECK(f(0) == 1.0);
    CHECK(f(1) == 0.0);

    x << 1.0, 1.0;
    u << 0.0;
    f = vector_field(sys, x, u);
    CHECK(f(0) == -1.0);
    CHECK(f(1) == 0.0);
}

TEST_CASE("vector field vanishes where the gradient vanishes", "[ph_core]") {
    VectorXd b(2);
    b << -1.0, -2.0;
    const LtiPhSystem sys = validate_structure(
        make_rlc({}).J, make_rlc({}).R, make_rlc({}).G,
        QuadraticHamiltonian(MatrixXd::Identity(2, 2), b));
    VectorXd x(2);
    x << 1.0, 2.0;
    CHECK(vector_field(sys, x, VectorXd::Zero(1)).norm() == 0.0);
}

TEST_CASE("output is the current through the port", "[ph_core]") {
    VectorXd x(2);
    x << 2.0, 5.0;
    CHECK(output(make_rlc({}), x)(0) == 2.0);

    RlcParams p;
    p.L = 2.0;
    x << 2.0, 0.0;
    CHECK(output(make_rlc(p), x)(0) == 1.0);
}

TEST_CASE("power balance identity holds on random systems", "[ph_core]") {
    std::mt19937 rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 5;
        const Eigen::Index m = trial % 4;
        const LtiPhSystem sys = random_system(rng, n, m, trial % 2 == 0);
        const VectorXd x = random_vector(rng, n, 2.0);
        const VectorXd u = random_vector(rng, m, 2.0);
        const VectorXd g = sys.ham.gradient(x);
        const double lhs = g.dot(vector_field(sys, x, u));
        const double rhs = -g.dot(sys.R * g) + output(sys, x).dot(u);
        const double scale = 1.0 + std::abs(lhs) + std::abs(rhs) + g.squaredNorm();
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("equilibrium solve matches the RLC closed form", "[ph_core]") {
    VectorXd u(1);
    u << 1.0;
    VectorXd xs = equilibrium_for_input(make_rlc({}), u);
    CHECK(std::abs(xs(0) - 1.0) < 1e-12);
    CHECK(std::abs(xs(1) - 1.0) < 1e-12);

    RlcParams p;
    p.L = 2.0;
    p.C = 3.0;
    p.r = 4.0;
    u << 2.0;
    xs = equilibrium_for_input(make_rlc(p), u);
    CHECK(std::abs(xs(0) - 1.0) < 1e-12);
    CHECK(std::abs(xs(1) - 6.0) < 1e-12);
}

TEST_CASE("zero input and centered energy give the origin", "[ph_core]") {
    const VectorXd xs = equilibrium_for_input(make_rlc({}), VectorXd::Zero(1));
    CHECK(xs.norm() == 0.0);
}

TEST_CASE("equilibrium residual is small on random passive systems", "[ph_core]") {
    std::mt19937 rng(303);
    int checked = 0;
    while (checked < 50) {
        const Eigen::Index n = 2 + checked % 4;
        const LtiPhSystem sys = random_system(rng, n, 2, true);
        if (rcond_estimate((sys.J - sys.R) * sys.ham.Q()) < 1e-6) continue;
        const VectorXd u = random_vector(rng, 2, 3.0);
        const VectorXd xs = equilibrium_for_input(sys, u);
        CHECK(vector_field(sys, xs, u).lpNorm<Eigen::Infinity>() <=
              1e-10 * (1.0 + u.lpNorm<Eigen::Infinity>()));
        ++checked;
    }
}

TEST_CASE("singular steady dynamics are reported, not inverted", "[ph_core]") {
    const MatrixXd J = MatrixXd::Zero(2, 2);
    MatrixXd R(2, 2);
    R << 1.0, 0.0, 0.0, 0.0;
    const LtiPhSystem sys = validate_structure(
        J, R, MatrixXd::Identity(2, 2).leftCols(1),
        QuadraticHamiltonian(MatrixXd::Identity(2, 2), VectorXd::Zero(2)));
    CHECK_THROWS_AS(equilibrium_for_input(sys, VectorXd::Zero(1)), SingularDynamics);
}

TEST_CASE("feedback interconnection wires the RLC to a scalar controller", "[ph_core]") {
    const LtiPhSystem plant = make_rlc({});
    MatrixXd Gc(1, 1);
    Gc << 1.0;
    const LtiPhSystem ctrl = validate_structure(
        MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), Gc,
        QuadraticHamiltonian(MatrixXd::Identity(1, 1), VectorXd::Zero(1)));
    const LtiPhSystem loop = feedback_interconnect(plant, ctrl);

    REQUIRE(loop.n == 3);
    CHECK(loop.m == 0);
    CHECK(loop.J(0, 2) == -1.0);
    CHECK(loop.J(1, 2) == 0.0);
    CHECK(loop.J(2, 0) == 1.0);
    CHECK(loop.J(2, 1) == 0.0);
    CHECK(loop.R(2, 2) == 0.0);
    CHECK(loop.R(0, 0) == plant.R(0, 0));
    CHECK(loop.ham.Q()(2, 2) == 1.0);
    CHECK(loop.ham.Q()(0, 2) == 0.0);
}

TEST_CASE("two isolated systems interconnect block diagonally", "[ph_core]") {
    std::mt19937 rng(7);
    const QuadraticHamiltonian ham1(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
    const LtiPhSystem a = validate_structure(phcbi_test::random_skew(rng, 2),
                                             MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 0), ham1);
    const LtiPhSystem b = validate_structure(MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1),
                                             MatrixXd::Zero(1, 0),
                                             QuadraticHamiltonian(MatrixXd::Identity(1, 1),
                                                                  VectorXd::Zero(1)));
    const LtiPhSystem loop = feedback_interconnect(a, b);
    CHECK(loop.J.block(0, 2, 2, 1).norm() == 0.0);
    CHECK(loop.J.block(2, 0, 1, 2).norm() == 0.0);
}

TEST_CASE("interconnection invariants hold on random pairs", "[ph_core]") {
    std::mt19937 rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 4;
        const Eigen::Index nc = 1 + (trial / 2) % 3;
        const Eigen::Index m = 1 + trial % 3;
        const LtiPhSystem plant = random_system(rng, n, m, trial % 2 == 0);
        const LtiPhSystem ctrl = random_system(rng, nc, m, trial % 3 == 0);
        const LtiPhSystem loop = feedback_interconnect(plant, ctrl);

        REQUIRE(loop.n == n + nc);
        CHECK(loop.m == 0);
        CHECK(is_skew(loop.J));
        CHECK(is_symmetric(loop.R));
        CHECK((loop.J.topRightCorner(n, nc) + loop.J.bottomLeftCorner(nc, n).transpose())
                  .lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK((loop.J.topRightCorner(n, nc) + plant.G * ctrl.G.transpose())
                  .lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK(loop.R.topRightCorner(n, nc).lpNorm<Eigen::Infinity>() == 0.0);

        const VectorXd z = random_vector(rng, n + nc, 2.0);
        const double e_sum = plant.ham.value(z.head(n)) + ctrl.ham.value(z.tail(nc));
        CHECK(std::abs(loop.ham.value(z) - e_sum) <= 1e-12 * (1.0 + std::abs(e_sum)));
    }
}

TEST_CASE("interconnection rejects mismatched port counts", "[ph_core]") {
    std::mt19937 rng(505);
    const LtiPhSystem plant = random_system(rng, 2, 1, true);
    const LtiPhSystem ctrl = random_system(rng, 1, 2, true);
    CHECK_THROWS_AS(feedback_interconnect(plant, ctrl), PortMismatch);
}

TEST_CASE("definiteness classification on pinned matrices", "[ph_core]") {
    CHECK(definiteness(MatrixXd::Identity(3, 3)).classification ==
          Definiteness::PositiveDefinite);

    MatrixXd m(2, 2);
    m << 1.0, -0.5, -0.5, 1.0;
    const DefinitenessVerdict pd = definiteness(m);
    CHECK(pd.classification == Definiteness::PositiveDefinite);
    CHECK(std::abs(pd.min_eig - 0.5) < 1e-12);
    CHECK(std::abs(pd.max_eig - 1.5) < 1e-12);

    m << -1.0, 0.5, 0.5, 1.0;
    CHECK(definiteness(m).classification == Definiteness::Indefinite);

    CHECK(definiteness(MatrixXd::Zero(2, 2)).classification ==
          Definiteness::PositiveSemidefinite);
    CHECK(definiteness(MatrixXd(-MatrixXd::Identity(2, 2))).classification ==
          Definiteness::NegativeDefinite);
}

TEST_CASE("definiteness is scale consistent away from the tolerance band", "[ph_core]") {
    std::mt19937 rng(606);
    int checked = 0;
    while (checked < 30) {
        const MatrixXd m = random_sym(rng, 3);
        const Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-6) continue;
        const Definiteness base = definiteness(m).classification;
        for (double alpha : {0.5, 2.0, 10.0})
            CHECK(definiteness(MatrixXd(alpha * m)).classification == base);
        ++checked;
    }
}

TEST_CASE("definiteness rejects asymmetric input", "[ph_core]") {
    MatrixXd m(2, 2);
    m << 1.0, 0.2, 0.0, 1.0;
    CHECK_THROWS_AS(definiteness(m), NotSymmetric);
}
