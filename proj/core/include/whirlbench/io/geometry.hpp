#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "whirlbench/rotor.hpp"

namespace whirlbench::io {

struct GeometryNode {
    int id = 0;
    double x = 0.0;  // m, along the spin axis
    double y = 0.0;
    double z = 0.0;
    bool operator==(const GeometryNode&) const = default;
};

struct DofMapEntry {
    int node = 0;
    rotor::Lateral direction = rotor::Lateral::Y;
    std::size_t index = 0;
    bool operator==(const DofMapEntry&) const = default;
};

/// Wireframe used to animate or annotate rotor measurements.
struct GeometryModel {
    std::vector<GeometryNode> nodes;
    std::vector<std::vector<int>> trace_lines;
    std::vector<DofMapEntry> dof_map;

    /// Unique node ids, traces and DOF entries referencing existing nodes,
    /// unique DOF indices.
    void validate() const;
    bool operator==(const GeometryModel&) const = default;
};

/// {"nodes": [{"id", "x", "y", "z"}], "traces": [[ids]], "dofs": [{"node", "direction", "index"}]}.
/// "dofs" is optional.
GeometryModel read_geometry(std::string_view json);
std::string write_geometry(const GeometryModel& model);

/// Bearings, disk station and a four-point disk rim for the parametric rotor.
GeometryModel default_rotor_geometry(const rotor::RotorParameters& params = {});

}  // namespace whirlbench::io
