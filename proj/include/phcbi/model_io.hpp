#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "phcbi/errors.hpp"
#include "phcbi/sim.hpp"
#include "phcbi/system.hpp"

namespace phcbi {

using nlohmann::json;

/// Row-major nested arrays; doubles survive the round trip bit-exactly.
[[nodiscard]] inline json matrix_to_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

[[nodiscard]] inline json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline double number_entry(const json& j, const std::string& where) {
    if (!j.is_number()) throw BadParam("model: " + where + " is not a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw BadParam("model: " + where + " is not finite");
    return v;
}

[[nodiscard]] inline MatrixXd matrix_from_json(const json& j, Eigen::Index rows,
                                               Eigen::Index cols, const std::string& name) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw BadParam("model: \"" + name + "\" must be an array of " + std::to_string(rows) +
                       " rows");
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw BadParam("model: \"" + name + "\" row " + std::to_string(i) + " must have " +
                           std::to_string(cols) + " entries");
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = number_entry(row[static_cast<size_t>(k)],
                                   "\"" + name + "\"[" + std::to_string(i) + "][" +
                                       std::to_string(k) + "]");
    }
    return m;
}

[[nodiscard]] inline VectorXd vector_from_json(const json& j, Eigen::Index size,
                                               const std::string& name) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
        throw BadParam("model: \"" + name + "\" must be an array of " + std::to_string(size) +
                       " entries");
    VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i)
        v(i) = number_entry(j[static_cast<size_t>(i)],
                            "\"" + name + "\"[" + std::to_string(i) + "]");
    return v;
}

/// Model schema:
///   {"n": int, "m": int, "J": [[...]], "R": [[...]], "G": [[...]],
///    "Q": [[...]], "b": [...], "c0": num}
[[nodiscard]] inline json model_to_json(const LtiPhSystem& sys) {
    json j;
    j["n"] = sys.n;
    j["m"] = sys.m;
    j["J"] = matrix_to_json(sys.J);
    j["R"] = matrix_to_json(sys.R);
    j["G"] = matrix_to_json(sys.G);
    j["Q"] = matrix_to_json(sys.ham.Q());
    j["b"] = vector_to_json(sys.ham.b());
    j["c0"] = sys.ham.c0();
    return j;
}

/// Parse and structurally validate a model; error messages name the
/// missing field, malformed entry, or violated pH invariant.
[[nodiscard]] inline LtiPhSystem model_from_json(const json& j, const Tolerances& tol = {}) {
    if (!j.is_object()) throw BadParam("model: top level must be a JSON object");
    for (const char* field : {"n", "m", "J", "R", "G", "Q", "b", "c0"})
        if (!j.contains(field))
            throw BadParam(std::string("model: missing field \"") + field + "\"");
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 0)
        throw BadParam("model: \"n\" must be a non-negative integer");
    if (!j["m"].is_number_integer() || j["m"].get<long long>() < 0)
        throw BadParam("model: \"m\" must be a non-negative integer");
    const auto n = static_cast<Eigen::Index>(j["n"].get<long long>());
    const auto m = static_cast<Eigen::Index>(j["m"].get<long long>());

    const MatrixXd J = matrix_from_json(j["J"], n, n, "J");
    const MatrixXd R = matrix_from_json(j["R"], n, n, "R");
    const MatrixXd G = matrix_from_json(j["G"], n, m, "G");
    const MatrixXd Q = matrix_from_json(j["Q"], n, n, "Q");
    const VectorXd b = vector_from_json(j["b"], n, "b");
    const double c0 = number_entry(j["c0"], "\"c0\"");

    return validate_structure(J, R, G, QuadraticHamiltonian(Q, b, c0, tol.sym), tol);
}

[[nodiscard]] inline LtiPhSystem load_model(const std::string& path, const Tolerances& tol = {}) {
    std::ifstream in(path);
    if (!in) throw BadParam("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw BadParam("model: " + path + " is not valid JSON (" + e.what() + ")");
    }
    return model_from_json(j, tol);
}

inline void save_model(const LtiPhSystem& sys, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw BadParam("cannot open file for writing: " + path);
    out << model_to_json(sys).dump(2) << "\n";
}

/// 17 significant digits: enough for the shortest exact decimal of any
/// double, so trajectories re-parse to the bits that were simulated.
inline void append_csv_number(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

[[nodiscard]] inline std::string trajectory_csv(const Trajectory& traj) {
    const Eigen::Index np = traj.x.cols();
    const Eigen::Index nc = traj.xi.cols();
    std::string out = "t";
    for (Eigen::Index i = 1; i <= np; ++i) out += ",x" + std::to_string(i);
    for (Eigen::Index i = 1; i <= nc; ++i) out += ",xi" + std::to_string(i);
    out += ",H,Hc,C,power_residual\n";
    for (Eigen::Index k = 0; k < traj.samples(); ++k) {
        std::string line;
        append_csv_number(line, traj.t(k));
        for (Eigen::Index i = 0; i < np; ++i) {
            line += ',';
            append_csv_number(line, traj.x(k, i));
        }
        for (Eigen::Index i = 0; i < nc; ++i) {
            line += ',';
            append_csv_number(line, traj.xi(k, i));
        }
        for (double v : {traj.H_vals(k), traj.Hc_vals(k), traj.casimir_vals(k),
                         traj.power_residual(k)}) {
            line += ',';
            append_csv_number(line, v);
        }
        line += '\n';
        out += line;
    }
    return out;
}

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw BadParam("cannot open file for writing: " + path);
    out << trajectory_csv(traj);
}

} // namespace phcbi
