#include "whirlbench/io/rotor_config.hpp"

#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "whirlbench/error.hpp"
#include "whirlbench/units.hpp"

namespace whirlbench::io {

using nlohmann::json;

namespace {

Eigen::MatrixXd matrix_from(const json& rows, const char* name, Eigen::Index n) {
    if (!rows.is_array()) throw ValidationError(fmt::format("'{}' must be an array of rows", name));
    if (n >= 0 && static_cast<Eigen::Index>(rows.size()) != n)
        throw ValidationError(fmt::format("'{}' has {} rows, expected {}", name, rows.size(), n));
    const auto size = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != size)
            throw ValidationError(fmt::format("'{}' row {} must hold {} numbers", name, i, size));
        for (Eigen::Index j = 0; j < size; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

json matrix_to(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

rotor::RotorSystem read_rotor_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("rotor config: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("rotor config must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (key != "parameters" && key != "matrices" && key != "dofs" && key != "spin_speed" && key != "spin_speed_rpm" &&
            key != "loss_factor")
            throw ValidationError(fmt::format("rotor config: unrecognized key '{}'", key));
    if (doc.contains("parameters") == doc.contains("matrices"))
        throw ValidationError("rotor config needs exactly one of 'parameters' or 'matrices'");
    if (doc.contains("spin_speed") && doc.contains("spin_speed_rpm"))
        throw ValidationError("rotor config: give spin_speed or spin_speed_rpm, not both");

    rotor::RotorSystem system;
    try {
        if (doc.contains("parameters")) {
            std::map<std::string, double> overrides;
            for (const auto& [key, value] : doc["parameters"].items()) overrides[key] = value.get<double>();
            system = rotor::build_default_rotor(overrides);
        } else {
            const auto& m = doc["matrices"];
            system.mass = matrix_from(m.at("mass"), "mass", -1);
            const auto n = system.mass.rows();
            system.stiffness = matrix_from(m.at("stiffness"), "stiffness", n);
            system.damping = m.contains("damping") ? matrix_from(m["damping"], "damping", n) : Eigen::MatrixXd::Zero(n, n);
            system.gyroscopic = m.contains("gyroscopic") ? matrix_from(m["gyroscopic"], "gyroscopic", n) : Eigen::MatrixXd::Zero(n, n);
            if (doc.contains("dofs")) {
                for (const auto& d : doc["dofs"])
                    system.dof_labels.push_back({d.at("node").get<int>(), rotor::lateral_from_string(d.at("direction").get<std::string>())});
            } else {
                // Default labels pair consecutive DOFs as (Y, Z) at nodes 1, 2, ...
                for (Eigen::Index i = 0; i < n; ++i)
                    system.dof_labels.push_back({static_cast<int>(i / 2) + 1, i % 2 == 0 ? rotor::Lateral::Y : rotor::Lateral::Z});
            }
        }
        if (doc.contains("spin_speed")) system.spin_speed = doc["spin_speed"].get<double>();
        if (doc.contains("spin_speed_rpm")) system.spin_speed = rpm_to_rad_per_s(doc["spin_speed_rpm"].get<double>());
        if (doc.contains("loss_factor")) system.loss_factor = doc["loss_factor"].get<double>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("rotor config: ") + e.what());
    }
    system.validate();
    return system;
}

std::string write_rotor_config(const rotor::RotorSystem& system) {
    system.validate();
    json doc;
    doc["matrices"] = {{"mass", matrix_to(system.mass)},
                       {"stiffness", matrix_to(system.stiffness)},
                       {"damping", matrix_to(system.damping)},
                       {"gyroscopic", matrix_to(system.gyroscopic)}};
    doc["dofs"] = json::array();
    for (const auto& l : system.dof_labels) doc["dofs"].push_back({{"node", l.node}, {"direction", rotor::to_string(l.direction)}});
    doc["spin_speed"] = system.spin_speed;
    doc["loss_factor"] = system.loss_factor;
    return doc.dump(2) + "\n";
}

}  // namespace whirlbench::io
