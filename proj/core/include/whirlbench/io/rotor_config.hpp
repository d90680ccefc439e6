#pragma once

#include <string>
#include <string_view>

#include "whirlbench/rotor.hpp"

namespace whirlbench::io {

/// Rotor description as JSON. Either parametric:
///   {"parameters": {"disk_mass": 0.8, ...}, "spin_speed_rpm": 3000}
/// or explicit matrices:
///   {"matrices": {"mass": [[..]], "stiffness": [[..]], "damping": [[..]],
///                 "gyroscopic": [[..]]},
///    "dofs": [{"node": 2, "direction": "y"}, ...], "spin_speed": 314.2}
/// Top-level spin_speed (rad/s), spin_speed_rpm and loss_factor override the
/// parametric values. Unknown keys are rejected.
rotor::RotorSystem read_rotor_config(std::string_view json);

/// Matrix form of any system; read_rotor_config reproduces it.
std::string write_rotor_config(const rotor::RotorSystem& system);

}  // namespace whirlbench::io
