// Acceptance gate: one check per promised behavior, one PASS/FAIL line
// each, exit code = number of failures. Tolerances are stated inline and
// never loosened to force a green run.

#include <phcbi/phcbi.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

using namespace phcbi;

namespace {

int failures = 0;

void report(const std::string& label, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
    if (!ok) ++failures;
}

double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------- 1
void criterion_1() {
    bool ok = true;
    std::string detail = "Casimir closed form, pinned instance + 50 randomized draws";

    const CasimirSolution sol = solve_casimir(make_rlc({}), 1.0);
    ok &= close(sol.K(0, 0), -1.0, 1e-12);
    ok &= close(sol.K(1, 0), 1.0, 1e-12);
    ok &= close(sol.Rc(0, 0), -1.0, 1e-12);
    ok &= close(sol.Jc(0, 0), 0.0, 1e-12);
    ok &= sol.residual_pde1 <= 1e-12;
    ok &= sol.residual_pde2 <= 1e-12;

    std::mt19937 rng(2024);
    for (int draw = 0; draw < 50; ++draw) {
        RlcParams p;
        p.L = uniform(rng, 0.1, 10.0);
        p.C = uniform(rng, 0.1, 10.0);
        p.r = uniform(rng, 0.1, 10.0);
        double Gc = uniform(rng, -5.0, 5.0);
        if (std::abs(Gc) < 0.1) Gc = std::copysign(0.1, Gc == 0.0 ? 1.0 : Gc);

        const CasimirSolution s = solve_casimir(make_rlc(p), Gc);
        const RlcOracle oracle = rlc_oracle(p, Gc, 0.0, 1.0);
        ok &= (s.K - oracle.K_expected).lpNorm<Eigen::Infinity>() <=
              1e-12 * (1.0 + inf_norm(oracle.K_expected));
        ok &= close(s.Rc(0, 0), oracle.Rc_expected, 1e-12 * (1.0 + std::abs(oracle.Rc_expected)));
        if (!ok) {
            detail += " (failed at draw " + std::to_string(draw) + ")";
            break;
        }
    }
    report("criterion 1", ok, detail);
}

// ---------------------------------------------------------------- 2
void criterion_2() {
    const LtiPhSystem plant = make_rlc({});
    const CasimirSolution sol = solve_casimir(plant, 1.0);
    const ObstacleReport obs = obstacle_check(plant, sol);

    bool ok = obs.classification == ObstacleClass::BeyondObstacle;
    ok &= obs.norm_RK == 1.0;  // |Gc|/r exactly

    const LtiPhSystem lossless = make_rlc_lossless({});
    const CasimirSolution sol0 = solve_casimir(lossless, 1.0);
    const ObstacleReport obs0 = obstacle_check(lossless, sol0);
    ok &= obs0.classification == ObstacleClass::Classical;
    ok &= obs0.norm_RK <= 1e-10 && obs0.norm_Rc <= 1e-10;
    ok &= obs0.norm_JK_plus_GGc <= 1e-10 && obs0.norm_Jc_match <= 1e-10;

    report("criterion 2", ok,
           "obstacle detection: resistive case beyond-obstacle with norm_RK = |Gc|/r, "
           "lossless case classical to 1e-10");
}

// ---------------------------------------------------------------- 3
void criterion_3() {
    const RlcCase cs = feedforward_case({});
    bool ok = close(output(cs.controller, VectorXd::Zero(1))(0), -1.0, 1e-12);
    const double dyn_const = (cs.controller.J(0, 0) - cs.controller.R(0, 0)) * cs.a2;
    ok &= close(dyn_const, 1.0, 1e-12);           // (u*)^2 / r
    ok &= close(cs.controller.G(0, 0), -1.0, 1e-12);  // -u*

    const SimSetup setup = closed_loop_setup(cs.plant, cs.controller, cs.casimir);
    const Trajectory traj = simulate(setup, VectorXd::Zero(3), 0.01, 50.0);
    const Eigen::Index last = traj.samples() - 1;
    ok &= close(traj.x(last, 0), 1.0, 1e-6);
    ok &= close(traj.x(last, 1), 1.0, 1e-6);
    ok &= std::abs(traj.xi(last, 0)) <= 1e-6;
    ok &= casimir_drift(traj) <= 1e-8;

    report("criterion 3", ok,
           "feedforward recovery: y_c = -1, drift coefficients ((u*)^2/r, -u*), loop reaches "
           "(1,1) with flat invariant");
}

// ---------------------------------------------------------------- 4
void criterion_4() {
    const RlcCase of = output_feedback_case({}, -1.0, -1.0, 1.0);
    const PoincareReport pr_of = poincare_check(of.plant, of.casimir, of.hc);
    bool ok = close(pr_of.asym_defect, 2.0, 1e-10);
    ok &= !pr_of.integrable;

    const RlcCase ff = feedforward_case({});
    const PoincareReport pr_ff = poincare_check(ff.plant, ff.casimir, ff.hc);
    ok &= pr_ff.integrable;

    report("criterion 4", ok,
           "integrability check: asym_defect = 2 and not integrable for curvature -1, "
           "integrable for the feedforward case");
}

// ---------------------------------------------------------------- 5
void criterion_5() {
    const RlcCase of = output_feedback_case({}, -1.0, -1.0, 1.0);
    const AffineDynamics ad = closed_loop_plant_affine(of.plant, of.casimir, of.hc);
    const ShapedDynamics sd = ida_decompose(ad.A, ad.c, MatrixXd::Identity(2, 2));

    MatrixXd Jd_exp(2, 2), Rd_exp(2, 2);
    Jd_exp << 0.0, -0.5, 0.5, 0.0;
    Rd_exp << 1.0, -0.5, -0.5, 1.0;
    VectorXd xbar_exp(2);
    xbar_exp << 1.0, 1.0;

    bool ok = (sd.Jd - Jd_exp).lpNorm<Eigen::Infinity>() <= 1e-10;
    ok &= (sd.Rd - Rd_exp).lpNorm<Eigen::Infinity>() <= 1e-10;
    ok &= (sd.x_bar - xbar_exp).lpNorm<Eigen::Infinity>() <= 1e-10;
    ok &= close(sd.x_bar(1) / 1.0, 1.0, 1e-10);  // alpha = C alpha / C
    ok &= sd.match_residual <= 1e-10;
    ok &= sd.rd_verdict.classification == Definiteness::PositiveDefinite;
    ok &= close(sd.rd_verdict.min_eig, 0.5, 1e-10);
    ok &= close(sd.rd_verdict.max_eig, 1.5, 1e-10);
    ok &= equilibrium_test(sd).stable_declared;

    const RlcCase flipped = output_feedback_case({}, 1.0, -1.0, 1.0);
    const AffineDynamics adf = closed_loop_plant_affine(flipped.plant, flipped.casimir,
                                                        flipped.hc);
    const ShapedDynamics sdf = ida_decompose(adf.A, adf.c, MatrixXd::Identity(2, 2));
    ok &= sdf.rd_verdict.classification == Definiteness::Indefinite;
    ok &= !equilibrium_test(sdf).stable_declared;

    report("criterion 5", ok,
           "matched factorization: pinned Jd/Rd/minimizer, positive-definite damping, "
           "declaration granted and withheld correctly");
}

// ---------------------------------------------------------------- 6
void criterion_6() {
    const RlcCase cs = feedforward_case({});
    const SimSetup setup = closed_loop_setup(cs.plant, cs.controller, cs.casimir);

    const Trajectory coarse = simulate(setup, VectorXd::Zero(3), 0.01, 50.0);
    const Trajectory fine = simulate(setup, VectorXd::Zero(3), 0.005, 50.0);
    const double drift_coarse = casimir_drift(coarse);
    const double drift_fine = casimir_drift(fine);
    const double ratio = drift_fine > 0.0 ? drift_coarse / drift_fine : 0.0;

    const bool ok_ratio = ratio >= 12.0 && ratio <= 20.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "invariant drift ratio under dt halving in [12, 20]: drift(0.01) = %.3e, "
                  "drift(0.005) = %.3e, ratio = %.3f",
                  drift_coarse, drift_fine, ratio);
    report("criterion 6a", ok_ratio, buf);
    if (!ok_ratio)
        std::printf(
            "     note: the monitored invariant is linear in the state and the integrator\n"
            "     preserves linear invariants exactly, so its drift sits at the round-off\n"
            "     floor at every step size instead of scaling with dt^4; the fourth-order\n"
            "     contraction is visible in the global state error (see the [sim] suite)\n");

    const double audit = energy_audit(coarse, cs.plant.R, cs.controller.R);
    char buf2[128];
    std::snprintf(buf2, sizeof buf2,
                  "power balance audit at dt = 0.01: max residual %.3e <= 1e-3", audit);
    report("criterion 6b", audit <= 1e-3, buf2);
}

// ---------------------------------------------------------------- 7
void criterion_7() {
    std::mt19937 rng(4096);
    bool ok = true;
    std::string detail = "structural suite over 100 random plant/controller pairs";

    auto random_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
        MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, -2.0, 2.0);
        return m;
    };
    auto random_vector = [&](Eigen::Index n) {
        VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng, -2.0, 2.0);
        return v;
    };
    auto random_system = [&](Eigen::Index n, Eigen::Index m, bool passive) {
        const MatrixXd a = random_matrix(n, n);
        const MatrixXd J = a - a.transpose();
        const MatrixXd base = random_matrix(n, n);
        const MatrixXd R = passive ? MatrixXd(base * base.transpose())
                                   : MatrixXd(base + base.transpose());
        const MatrixXd sym = random_matrix(n, n);
        return validate_structure(J, R, random_matrix(n, m),
                                  QuadraticHamiltonian(MatrixXd(sym + sym.transpose()),
                                                       random_vector(n)));
    };

    for (int trial = 0; trial < 100 && ok; ++trial) {
        const Eigen::Index n = 1 + trial % 4;
        const Eigen::Index nc = 1 + (trial / 3) % 3;
        const Eigen::Index m = 1 + trial % 3;
        const bool plant_passive = trial % 2 == 0;
        const LtiPhSystem plant = random_system(n, m, plant_passive);
        const LtiPhSystem ctrl = random_system(nc, m, trial % 3 == 0);

        const LtiPhSystem loop = feedback_interconnect(plant, ctrl);
        ok &= is_skew(loop.J) && is_symmetric(loop.R);
        ok &= (loop.J.topRightCorner(n, nc) + plant.G * ctrl.G.transpose())
                  .lpNorm<Eigen::Infinity>() <= 1e-12;
        ok &= loop.R.topRightCorner(n, nc).lpNorm<Eigen::Infinity>() == 0.0;

        const VectorXd x = random_vector(n);
        const VectorXd u = random_vector(m);
        const VectorXd g = plant.ham.gradient(x);
        const double lhs = g.dot(vector_field(plant, x, u));
        const double rhs = -g.dot(plant.R * g) + output(plant, x).dot(u);
        ok &= std::abs(lhs - rhs) <=
              1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs) + g.squaredNorm());

        if (plant_passive) {
            const MatrixXd K = random_matrix(n, nc);
            const MatrixXd Rc = induced_structure(plant, K).second;
            ok &= definiteness(Rc).nonpos();
        }
        if (!ok) detail += " (failed at trial " + std::to_string(trial) + ")";
    }
    report("criterion 7", ok, detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();

    std::printf("%d failing check(s)\n", failures);
    return failures;
}
