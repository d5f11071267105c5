#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "phcbi/casimir.hpp"
#include "phcbi/model_io.hpp"
#include "phcbi/shaping.hpp"
#include "phcbi/sim.hpp"

namespace phcbi {

[[nodiscard]] inline json to_json(const Tolerances& tol) {
    return {{"sym", tol.sym},
            {"chain", tol.chain},
            {"rcond_min", tol.rcond_min},
            {"definiteness", tol.definiteness}};
}

[[nodiscard]] inline json to_json(const DefinitenessVerdict& v) {
    return {{"classification", to_string(v.classification)},
            {"min_eig", v.min_eig},
            {"max_eig", v.max_eig},
            {"tol_used", v.tol_used}};
}

[[nodiscard]] inline json to_json(const CasimirSolution& sol) {
    return {{"K", matrix_to_json(sol.K)},
            {"Gc", matrix_to_json(sol.Gc)},
            {"kappa", vector_to_json(sol.kappa)},
            {"Jc", matrix_to_json(sol.Jc)},
            {"Rc", matrix_to_json(sol.Rc)},
            {"residual_pde1", sol.residual_pde1},
            {"residual_pde2", sol.residual_pde2},
            {"exact", sol.exact}};
}

[[nodiscard]] inline json to_json(const ObstacleReport& rep) {
    return {{"norm_RK", rep.norm_RK},
            {"norm_Rc", rep.norm_Rc},
            {"norm_JK_plus_GGc", rep.norm_JK_plus_GGc},
            {"norm_Jc_match", rep.norm_Jc_match},
            {"classical_chain_holds", rep.classical_chain_holds},
            {"classification", to_string(rep.classification)},
            {"chain_tol_used", rep.chain_tol_used}};
}

[[nodiscard]] inline json to_json(const PoincareReport& rep) {
    return {{"M", matrix_to_json(rep.M)},
            {"asym_defect", rep.asym_defect},
            {"integrable", rep.integrable},
            {"tol_used", rep.tol_used}};
}

[[nodiscard]] inline json to_json(const ShapedDynamics& sd) {
    return {{"Jd", matrix_to_json(sd.Jd)},
            {"Rd", matrix_to_json(sd.Rd)},
            {"W", matrix_to_json(sd.W)},
            {"x_bar", vector_to_json(sd.x_bar)},
            {"match_residual", sd.match_residual},
            {"rd_verdict", to_json(sd.rd_verdict)},
            {"hessian_verdict", to_json(sd.hessian_verdict)}};
}

[[nodiscard]] inline json to_json(const StabilityVerdict& v) {
    return {{"stable_declared", v.stable_declared},
            {"hessian", to_json(v.hessian)},
            {"rd", to_json(v.rd)},
            {"reason", v.reason}};
}

[[nodiscard]] inline json to_json(const AffineDynamics& cl) {
    return {{"A", matrix_to_json(cl.A)}, {"c", vector_to_json(cl.c)}};
}

/// Trajectory summary for reports; the full time series lives in the CSV.
[[nodiscard]] inline json trajectory_summary(const Trajectory& traj) {
    const Eigen::Index last = traj.samples() - 1;
    json j;
    j["dt"] = traj.dt;
    j["t_final"] = traj.t(last);
    j["samples"] = traj.samples();
    j["final_x"] = vector_to_json(traj.x.row(last).transpose());
    j["final_xi"] = vector_to_json(traj.xi.row(last).transpose());
    j["final_H"] = traj.H_vals(last);
    j["final_Hc"] = traj.Hc_vals(last);
    j["casimir_drift"] = casimir_drift(traj);
    j["max_power_residual"] = traj.power_residual.maxCoeff();
    return j;
}

/// Every command emits the same top-level shape; sections a command does
/// not produce stay null so consumers can key on a fixed schema.
[[nodiscard]] inline json empty_report(const std::string& command, const Tolerances& tol) {
    json j;
    j["command"] = command;
    j["tolerances"] = to_json(tol);
    j["model"] = nullptr;
    j["casimir"] = nullptr;
    j["obstacle"] = nullptr;
    j["poincare"] = nullptr;
    j["shaping"] = nullptr;
    j["simulation"] = nullptr;
    j["oracle"] = nullptr;
    j["notes"] = json::array();
    return j;
}

inline void write_report(const json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw BadParam("cannot open file for writing: " + path);
    out << report.dump(2) << "\n";
}

} // namespace phcbi
