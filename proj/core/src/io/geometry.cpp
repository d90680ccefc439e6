#include "whirlbench/io/geometry.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "whirlbench/error.hpp"

namespace whirlbench::io {

using nlohmann::json;

void GeometryModel::validate() const {
    std::set<int> ids;
    for (const auto& n : nodes) {
        if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.z))
            throw ValidationError(fmt::format("node {} has a non-finite coordinate", n.id));
        if (!ids.insert(n.id).second) throw ValidationError(fmt::format("duplicate node id {}", n.id));
    }
    for (std::size_t t = 0; t < trace_lines.size(); ++t)
        for (int id : trace_lines[t])
            if (!ids.contains(id)) throw ValidationError(fmt::format("trace {} references missing node {}", t, id));
    std::set<std::size_t> indices;
    for (const auto& d : dof_map) {
        if (!ids.contains(d.node)) throw ValidationError(fmt::format("DOF map references missing node {}", d.node));
        if (!indices.insert(d.index).second) throw ValidationError(fmt::format("DOF index {} mapped twice", d.index));
    }
}

GeometryModel read_geometry(std::string_view text) {
    GeometryModel model;
    try {
        const auto doc = json::parse(text);
        for (const auto& n : doc.at("nodes"))
            model.nodes.push_back({n.at("id").get<int>(), n.at("x").get<double>(), n.at("y").get<double>(), n.at("z").get<double>()});
        for (const auto& t : doc.at("traces")) model.trace_lines.push_back(t.get<std::vector<int>>());
        if (doc.contains("dofs"))
            for (const auto& d : doc["dofs"])
                model.dof_map.push_back({d.at("node").get<int>(), rotor::lateral_from_string(d.at("direction").get<std::string>()),
                                         d.at("index").get<std::size_t>()});
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("geometry: ") + e.what());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("geometry: ") + e.what());
    }
    model.validate();
    return model;
}

std::string write_geometry(const GeometryModel& model) {
    model.validate();
    json doc;
    doc["nodes"] = json::array();
    for (const auto& n : model.nodes) doc["nodes"].push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}, {"z", n.z}});
    doc["traces"] = model.trace_lines;
    if (!model.dof_map.empty()) {
        doc["dofs"] = json::array();
        for (const auto& d : model.dof_map)
            doc["dofs"].push_back({{"node", d.node}, {"direction", rotor::to_string(d.direction)}, {"index", d.index}});
    }
    return doc.dump(2) + "\n";
}

GeometryModel default_rotor_geometry(const rotor::RotorParameters& params) {
    const double length = params.shaft_length;
    const double disk_x = params.disk_position * length;
    const double rim = std::sqrt(2.0 * params.disk_polar_inertia / params.disk_mass);
    GeometryModel g;
    g.nodes = {{1, 0.0, 0.0, 0.0},  {2, disk_x, 0.0, 0.0}, {3, length, 0.0, 0.0}, {4, disk_x, rim, 0.0},
               {5, disk_x, 0.0, rim}, {6, disk_x, -rim, 0.0}, {7, disk_x, 0.0, -rim}};
    g.trace_lines = {{1, 2, 3}, {4, 5, 6, 7, 4}};
    g.dof_map = {{2, rotor::Lateral::Y, 0}, {2, rotor::Lateral::Z, 1}, {2, rotor::Lateral::TiltY, 2}, {2, rotor::Lateral::TiltZ, 3}};
    return g;
}

}  // namespace whirlbench::io
