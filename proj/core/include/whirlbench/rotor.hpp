#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace whirlbench::rotor {

/// Lateral degree-of-freedom direction at a node. Spin is about +x.
/// TiltY and TiltZ are the shaft slopes dy/dx and dz/dx, so a (TiltY, TiltZ)
/// pair traces the same orbit sense as a (Y, Z) pair.
enum class Lateral { Y, Z, TiltY, TiltZ };

struct DofLabel {
    int node = 0;
    Lateral direction = Lateral::Y;
    bool operator==(const DofLabel&) const = default;
};

std::string to_string(Lateral direction);
Lateral lateral_from_string(const std::string& text);

enum class WhirlDirection { Forward, Backward, Planar };

std::string to_string(WhirlDirection direction);

using DofIndexPair = std::pair<std::size_t, std::size_t>;

struct RotorSystem {
    Eigen::MatrixXd mass;
    Eigen::MatrixXd damping;
    Eigen::MatrixXd stiffness;
    /// Skew-symmetric, per rad/s of spin.
    Eigen::MatrixXd gyroscopic;
    /// rad/s
    double spin_speed = 0.0;
    /// Hysteretic loss factor applied as K(1 + i*eta). Enters frequency-domain
    /// synthesis only; whirl_eigen sees the viscous damping matrix alone.
    double loss_factor = 0.0;
    std::vector<DofLabel> dof_labels;

    std::size_t dofs() const { return static_cast<std::size_t>(mass.rows()); }

    /// Throws ValidationError when an invariant is broken.
    void validate() const;

    /// Orthogonal lateral pairs (Y,Z) and (TiltY,TiltZ) sharing a node.
    std::vector<DofIndexPair> whirl_pairs() const;

    std::size_t index_of(const DofLabel& label) const;

    bool undamped() const;
};

/// Physical description of the single-disk rig; defaults reproduce a 10 mm
/// steel shaft, 610 mm long, rigidly supported at both ends.
struct RotorParameters {
    double shaft_diameter = 0.010;       // m
    double shaft_length = 0.610;         // m
    double shaft_density = 7850.0;       // kg/m^3
    double shaft_modulus = 200e9;        // Pa
    double disk_mass = 0.8;              // kg
    double disk_polar_inertia = 1e-3;    // kg m^2
    double disk_diametral_inertia = 0.0; // kg m^2; 0 derives it from a steel disk
    double disk_position = 0.5;          // fraction of span from the first bearing
    double loss_factor = 0.02;
    double stiffness_damping = 0.0;      // s; C = beta * K
    double spin_speed = 0.0;             // rad/s

    /// Applies recognized keys; unknown keys and out-of-range values throw a
    /// ValidationError naming the key. spin_speed_rpm is accepted as an alias.
    static RotorParameters from_overrides(const std::map<std::string, double>& overrides);

    double diametral_inertia() const;
    double shaft_mass() const;
    /// 2x2 stiffness of the shaft at the disk station in (deflection, slope).
    Eigen::Matrix2d station_stiffness() const;
};

RotorSystem build_rotor(const RotorParameters& params);

/// 4-DOF disk model [Y, Z, TiltY, TiltZ] at node 2 (bearings are nodes 1, 3).
RotorSystem build_default_rotor(const std::map<std::string, double>& overrides = {});

/// Two-DOF isotropic model [Y, Z] with unit masses: M = m I, K = k I,
/// G = g [[0, 1], [-1, 0]].
RotorSystem isotropic_point_rotor(double mass, double stiffness, double gyro, double spin_speed = 0.0);

struct WhirlMode {
    std::complex<double> eigenvalue;
    /// rad/s
    double frequency = 0.0;
    double damping_ratio = 0.0;
    WhirlDirection direction = WhirlDirection::Planar;
    /// Displacement partition, unit norm, largest entry real positive.
    Eigen::VectorXcd eigenvector;
};

/// Raw eigenvalues of the 2n x 2n companion matrix, unsorted.
Eigen::VectorXcd companion_eigenvalues(const RotorSystem& system);

/// One mode per conjugate pair, ascending by frequency. Coincident pairs are
/// rotated into circular forward/backward combinations before classification.
std::vector<WhirlMode> whirl_eigen(const RotorSystem& system);

WhirlDirection classify_whirl(const Eigen::VectorXcd& eigenvector, DofIndexPair dof_pair);

/// Relative orbit-area threshold below which an orbit counts as planar.
inline constexpr double kPlanarThreshold = 1e-8;

struct CampbellBranch {
    int id = 0;
    WhirlDirection direction = WhirlDirection::Planar;
    /// rad/s, one per spin speed.
    std::vector<double> frequencies;
};

struct CampbellDiagram {
    std::vector<double> spin_speeds;  // rad/s
    std::vector<CampbellBranch> branches;
    /// Tie-break notes from branch continuation.
    std::vector<std::string> diagnostics;
};

CampbellDiagram campbell(const RotorSystem& system, std::span<const double> speeds);

/// Complex natural frequency of a hysteretically damped mode: the FRF pole
/// omega_tilde with omega_tilde^2 = omega^2 (1 + i eta_eff).
struct HystereticMode {
    double frequency = 0.0;
    double loss_factor = 0.0;
};

/// Poles of (K(1 + i eta) + i w (C + Omega G) - w^2 M) for w > 0, ascending.
std::vector<HystereticMode> hysteretic_modes(const RotorSystem& system);

}  // namespace whirlbench::rotor
