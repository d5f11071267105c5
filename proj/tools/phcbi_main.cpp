// phcbi: synthesize and verify Casimir-based interconnection controllers
// for linear port-Hamiltonian models, and simulate the closed loops.
//
// Commands: demo | synthesize | verify | simulate.
// Exit codes: 0 success, 1 input error, 2 oracle mismatch, 3 divergence.

#include <CLI11.hpp>

#include <phcbi/phcbi.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace phcbi;

namespace {

MatrixXd mat_from_flat(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols,
                       const std::string& flag) {
    if (static_cast<Eigen::Index>(v.size()) != rows * cols)
        throw BadParam(flag + ": expected " + std::to_string(rows * cols) +
                       " entries (row-major " + std::to_string(rows) + "x" +
                       std::to_string(cols) + "), got " + std::to_string(v.size()));
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[static_cast<size_t>(i * cols + j)];
    return m;
}

VectorXd vec_from(const std::vector<double>& v, Eigen::Index size, const std::string& flag) {
    if (static_cast<Eigen::Index>(v.size()) != size)
        throw BadParam(flag + ": expected " + std::to_string(size) + " entries, got " +
                       std::to_string(v.size()));
    VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) out(i) = v[static_cast<size_t>(i)];
    return out;
}

struct OutPaths {
    std::string report;
    std::string csv;
};

OutPaths make_out(const std::string& dir) {
    const fs::path d = dir.empty() ? fs::path(".") : fs::path(dir);
    fs::create_directories(d);
    return {(d / "report.json").string(), (d / "trajectory.csv").string()};
}

void print_simulation(const json& sim) {
    std::cout << "samples: " << sim["samples"] << ", t_final: " << sim["t_final"] << "\n";
    std::cout << "final_x: " << sim["final_x"] << ", final_xi: " << sim["final_xi"] << "\n";
    std::cout << "casimir_drift: " << sim["casimir_drift"]
              << ", energy_audit: " << sim["energy_audit"] << "\n";
}

int cmd_demo(const std::string& name, const RlcParams& p, double a1, double a2, double gc,
             double kappa, double dt, double tfinal, double oracle_tol,
             const std::string& out_dir, const Tolerances& tol) {
    const OutPaths paths = make_out(out_dir);
    DiffGates gates;
    gates.cap = oracle_tol;
    const DemoResult res = name == "rlc-ff"
                               ? run_demo_rlc_ff(p, kappa, dt, tfinal, gates, tol)
                               : run_demo_rlc_of(p, a1, a2, gc, kappa, dt, tfinal, gates, tol);

    json rep = build_verify_report("demo " + name, res.cs.plant, res.verify, tol);
    attach_simulation(rep, res.traj, res.cs.plant.R, res.cs.controller.R, paths.csv);
    attach_oracle(rep, res.diffs);
    write_trajectory_csv(res.traj, paths.csv);
    write_report(rep, paths.report);

    std::cout << "classification: " << to_string(res.verify.obstacle.classification) << "\n";
    std::cout << "path: " << res.verify.path << "\n";
    if (res.verify.stability)
        std::cout << "stable-declared: " << (res.verify.stability->stable_declared ? "yes" : "no")
                  << " (" << res.verify.stability->reason << ")\n";
    print_simulation(rep["simulation"]);
    for (const auto& d : res.diffs)
        if (!d.ok)
            std::cout << "oracle MISMATCH: " << d.name << " abs_error " << d.abs_error
                      << " > tol " << d.tol << "\n";
    std::cout << "oracle: " << (res.oracle_ok ? "all diffs within tolerance" : "MISMATCH")
              << "\n";
    std::cout << "wrote " << paths.report << " and " << paths.csv << "\n";
    return res.oracle_ok ? 0 : 2;
}

int cmd_synthesize(const std::string& model_path, Eigen::Index nc, const std::vector<double>& gc,
                   const std::vector<double>& kappa_v, const std::string& out_dir,
                   const Tolerances& tol) {
    const OutPaths paths = make_out(out_dir);
    const LtiPhSystem plant = load_model(model_path, tol);
    const MatrixXd Gc = mat_from_flat(gc, nc, plant.m, "--gc");
    const VectorXd kappa =
        kappa_v.empty() ? VectorXd::Zero(nc) : vec_from(kappa_v, nc, "--kappa");

    const CasimirSolution sol = solve_casimir(plant, Gc, kappa, tol);
    const ObstacleReport obs = obstacle_check(plant, sol, tol);

    json rep = empty_report("synthesize", tol);
    rep["model"] = model_to_json(plant);
    rep["casimir"] = to_json(sol);
    rep["obstacle"] = to_json(obs);
    if (!sol.exact)
        rep["notes"].push_back("Casimir equation solved in least squares only; residual_pde1 = " +
                               std::to_string(sol.residual_pde1));
    write_report(rep, paths.report);

    std::cout << "K:\n" << sol.K << "\n";
    std::cout << "Rc:\n" << sol.Rc << "\n";
    std::cout << "residual_pde1: " << sol.residual_pde1 << " (exact: " << (sol.exact ? "yes" : "no")
              << ")\n";
    std::cout << "classification: " << to_string(obs.classification) << "\n";
    std::cout << "wrote " << paths.report << "\n";
    return 0;
}

int cmd_verify(const std::string& model_path, Eigen::Index nc, const std::vector<double>& gc,
               const std::vector<double>& a1_v, const std::vector<double>& a2_v,
               const std::vector<double>& kappa_v, const std::vector<double>& W_v,
               const std::string& out_dir, const Tolerances& tol) {
    const OutPaths paths = make_out(out_dir);
    const LtiPhSystem plant = load_model(model_path, tol);

    ControllerSpec spec;
    spec.Gc = mat_from_flat(gc, nc, plant.m, "--gc");
    spec.A1 = a1_v.empty() ? MatrixXd::Zero(nc, nc) : mat_from_flat(a1_v, nc, nc, "--a1");
    spec.a2 = a2_v.empty() ? VectorXd::Zero(nc) : vec_from(a2_v, nc, "--a2");
    spec.kappa = kappa_v.empty() ? VectorXd::Zero(nc) : vec_from(kappa_v, nc, "--kappa");
    std::optional<MatrixXd> W;
    if (!W_v.empty()) W = mat_from_flat(W_v, plant.n, plant.n, "--W");

    const VerifyOutcome out = run_verification(plant, spec, W, tol);
    const json rep = build_verify_report("verify", plant, out, tol);
    write_report(rep, paths.report);

    std::cout << "classification: " << to_string(out.obstacle.classification) << "\n";
    if (out.poincare)
        std::cout << "integrable: " << (out.poincare->integrable ? "yes" : "no")
                  << " (asym_defect " << out.poincare->asym_defect << ")\n";
    std::cout << "path: " << out.path << "\n";
    if (out.stability)
        std::cout << "stable-declared: " << (out.stability->stable_declared ? "yes" : "no") << " ("
                  << out.stability->reason << ")\n";
    for (const auto& note : out.notes) std::cout << "note: " << note << "\n";
    std::cout << "wrote " << paths.report << "\n";
    return 0;
}

int cmd_simulate(const std::optional<std::string>& model_path,
                 const std::optional<std::string>& demo_name, const RlcParams& p, double a1,
                 double a2, double gc_scalar, Eigen::Index nc, const std::vector<double>& gc_v,
                 const std::vector<double>& a1_v, const std::vector<double>& a2_v,
                 const std::vector<double>& kappa_v, bool kappa_given,
                 const std::vector<double>& x0_v, const std::vector<double>& xi0_v,
                 const std::vector<double>& u_v, double dt, double tfinal,
                 const std::string& out_dir, const Tolerances& tol) {
    const OutPaths paths = make_out(out_dir);

    LtiPhSystem plant;
    std::optional<ControllerSpec> spec;
    if (demo_name) {
        plant = make_rlc(p, tol);
        if (*demo_name == "rlc-ff")
            spec = ControllerSpec::scalar(-p.u_star, 0.0, 1.0,
                                          kappa_v.empty() ? 0.0 : kappa_v[0]);
        else
            spec = ControllerSpec::scalar(gc_scalar, a1, a2, kappa_v.empty() ? 0.0 : kappa_v[0]);
    } else {
        plant = load_model(*model_path, tol);
        if (!gc_v.empty()) {
            ControllerSpec s;
            s.Gc = mat_from_flat(gc_v, nc, plant.m, "--gc");
            s.A1 = a1_v.empty() ? MatrixXd::Zero(nc, nc) : mat_from_flat(a1_v, nc, nc, "--a1");
            s.a2 = a2_v.empty() ? VectorXd::Zero(nc) : vec_from(a2_v, nc, "--a2");
            s.kappa = kappa_v.empty() ? VectorXd::Zero(nc) : vec_from(kappa_v, nc, "--kappa");
            spec = std::move(s);
        }
    }

    const VectorXd x0 = x0_v.empty() ? VectorXd::Zero(plant.n) : vec_from(x0_v, plant.n, "--x0");

    json rep = empty_report("simulate", tol);
    rep["model"] = model_to_json(plant);
    Trajectory traj;
    if (spec) {
        if (!xi0_v.empty() && !kappa_given)
            spec->kappa = default_kappa(plant, spec->Gc, x0,
                                        vec_from(xi0_v, spec->nc(), "--xi0"), tol);
        const CasimirSolution sol = solve_casimir(plant, spec->Gc, spec->kappa, tol);
        const LtiPhSystem ctrl = build_controller(sol, spec->hc(tol), tol);
        const SimSetup setup = closed_loop_setup(plant, ctrl, sol, tol);
        const VectorXd xi0 = xi0_v.empty()
                                 ? VectorXd(sol.K.transpose() * x0 + spec->kappa)
                                 : vec_from(xi0_v, spec->nc(), "--xi0");
        VectorXd z0(plant.n + ctrl.n);
        z0 << x0, xi0;
        traj = simulate(setup, z0, dt, tfinal);
        rep["casimir"] = to_json(sol);
        attach_simulation(rep, traj, plant.R, ctrl.R, paths.csv);
    } else {
        const VectorXd u = u_v.empty() ? VectorXd::Zero(plant.m) : vec_from(u_v, plant.m, "--u");
        traj = simulate(plant, u, x0, dt, tfinal);
        attach_simulation(rep, traj, plant.R, MatrixXd::Zero(0, 0), paths.csv);
    }

    write_trajectory_csv(traj, paths.csv);
    write_report(rep, paths.report);
    print_simulation(rep["simulation"]);
    std::cout << "wrote " << paths.report << " and " << paths.csv << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Casimir-based control by interconnection for linear port-Hamiltonian systems"};
    app.require_subcommand(1);

    Tolerances tol;
    app.add_option("--sym-tol", tol.sym, "relative symmetry tolerance");
    app.add_option("--chain-tol", tol.chain, "relative obstacle-chain tolerance");
    app.add_option("--rcond-min", tol.rcond_min, "singularity threshold (reciprocal condition)");
    app.add_option("--def-tol", tol.definiteness, "relative definiteness tolerance");

    std::string out_dir = ".";
    std::string model_path;
    std::string demo_name;
    RlcParams params;
    double a1 = -1.0, a2 = -1.0, gc_scalar = 1.0, kappa_scalar = 0.0;
    double dt = 0.01, tfinal = 50.0, oracle_tol = 1.0;
    Eigen::Index nc = 1;
    std::vector<double> gc_v, a1_v, a2_v, kappa_v, W_v, x0_v, xi0_v, u_v;

    CLI::App* demo = app.add_subcommand("demo", "run a built-in benchmark end to end");
    demo->fallthrough();
    demo->add_option("name", demo_name, "benchmark name")
        ->required()
        ->check(CLI::IsMember({"rlc-ff", "rlc-of"}));
    demo->add_option("--ustar", params.u_star, "source voltage");
    demo->add_option("--L", params.L, "inductance");
    demo->add_option("--C", params.C, "capacitance");
    demo->add_option("--r", params.r, "resistance");
    demo->add_option("--a1", a1, "controller energy curvature (rlc-of)");
    demo->add_option("--a2", a2, "controller energy slope (rlc-of)");
    demo->add_option("--gc", gc_scalar, "controller port gain (rlc-of)");
    demo->add_option("--kappa", kappa_scalar, "Casimir level");
    demo->add_option("--dt", dt, "integration step");
    demo->add_option("--tfinal", tfinal, "integration horizon");
    demo->add_option("--oracle-tol", oracle_tol,
                     "cap on every oracle tolerance (tightens, never loosens)");
    demo->add_option("--out", out_dir, "output directory");

    CLI::App* synth = app.add_subcommand("synthesize", "solve the Casimir equation for a model");
    synth->fallthrough();
    synth->add_option("--model", model_path, "model JSON path")->required();
    synth->add_option("--nc", nc, "controller state dimension");
    synth->add_option("--gc", gc_v, "port gain entries, row-major nc x m")
        ->required()
        ->delimiter(',');
    synth->add_option("--kappa", kappa_v, "Casimir levels")->delimiter(',');
    synth->add_option("--out", out_dir, "output directory");

    CLI::App* verify = app.add_subcommand("verify", "run the full verification pipeline");
    verify->fallthrough();
    verify->add_option("--model", model_path, "model JSON path")->required();
    verify->add_option("--nc", nc, "controller state dimension");
    verify->add_option("--gc", gc_v, "port gain entries, row-major nc x m")
        ->required()
        ->delimiter(',');
    verify->add_option("--a1", a1_v, "controller curvature entries, row-major nc x nc")
        ->delimiter(',');
    verify->add_option("--a2", a2_v, "controller slope entries")->delimiter(',');
    verify->add_option("--kappa", kappa_v, "Casimir levels")->delimiter(',');
    verify->add_option("--W", W_v, "factorization Hessian entries, row-major n x n")
        ->delimiter(',');
    verify->add_option("--out", out_dir, "output directory");

    CLI::App* sim = app.add_subcommand("simulate", "integrate a model or demo closed loop");
    sim->fallthrough();
    auto* sim_model = sim->add_option("--model", model_path, "model JSON path");
    auto* sim_demo =
        sim->add_option("--demo", demo_name, "benchmark name")
            ->check(CLI::IsMember({"rlc-ff", "rlc-of"}));
    sim_model->excludes(sim_demo);
    sim->add_option("--ustar", params.u_star, "source voltage (demo)");
    sim->add_option("--L", params.L, "inductance (demo)");
    sim->add_option("--C", params.C, "capacitance (demo)");
    sim->add_option("--r", params.r, "resistance (demo)");
    sim->add_option("--a1", a1_v, "controller curvature entries")->delimiter(',');
    sim->add_option("--a2", a2_v, "controller slope entries")->delimiter(',');
    sim->add_option("--gc", gc_v, "port gain entries, row-major nc x m")->delimiter(',');
    sim->add_option("--nc", nc, "controller state dimension");
    sim->add_option("--kappa", kappa_v, "Casimir levels")->delimiter(',');
    sim->add_option("--x0", x0_v, "initial plant state")->delimiter(',');
    sim->add_option("--xi0", xi0_v, "initial controller state")->delimiter(',');
    sim->add_option("--u", u_v, "constant input for open-loop runs")->delimiter(',');
    sim->add_option("--dt", dt, "integration step");
    sim->add_option("--tfinal", tfinal, "integration horizon");
    sim->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(demo)) {
            return cmd_demo(demo_name, params, a1, a2, gc_scalar, kappa_scalar, dt, tfinal,
                            oracle_tol, out_dir, tol);
        }
        if (app.got_subcommand(synth)) {
            return cmd_synthesize(model_path, nc, gc_v, kappa_v, out_dir, tol);
        }
        if (app.got_subcommand(verify)) {
            return cmd_verify(model_path, nc, gc_v, a1_v, a2_v, kappa_v, W_v, out_dir, tol);
        }
        if (app.got_subcommand(sim)) {
            if (model_path.empty() && demo_name.empty())
                throw BadParam("simulate: provide --model or --demo");
            const double a1_s = a1_v.empty() ? -1.0 : a1_v[0];
            const double a2_s = a2_v.empty() ? -1.0 : a2_v[0];
            const double gc_s = gc_v.empty() ? 1.0 : gc_v[0];
            return cmd_simulate(model_path.empty() ? std::nullopt
                                                   : std::make_optional(model_path),
                                demo_name.empty() ? std::nullopt
                                                  : std::make_optional(demo_name),
                                params, a1_s, a2_s, gc_s, nc, gc_v, a1_v, a2_v, kappa_v,
                                !kappa_v.empty(), x0_v, xi0_v, u_v, dt, tfinal, out_dir, tol);
        }
    } catch (const NonFinite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
