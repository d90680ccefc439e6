#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "whirlbench/rotor.hpp"

namespace whirlbench::frf {

using Complex = std::complex<double>;

enum class FrfKind { Receptance, Mobility, Accelerance };
enum class Provenance { Regenerated, Synthesized, Measured, Estimated };

std::string to_string(FrfKind kind);
std::string to_string(Provenance provenance);
FrfKind kind_from_string(const std::string& text);
Provenance provenance_from_string(const std::string& text);

/// (response j, reference k), zero-based.
struct DofPair {
    std::size_t response = 0;
    std::size_t reference = 0;
    auto operator<=>(const DofPair&) const = default;
};

struct FrfCurve {
    /// rad/s, strictly increasing, >= 0.
    std::vector<double> grid;
    std::vector<Complex> values;
    FrfKind kind = FrfKind::Receptance;
    DofPair dofs;
    Provenance provenance = Provenance::Regenerated;
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return grid.size(); }
    void validate() const;
};

struct SdofStructural {
    double stiffness = 0.0;           // N/m
    double mass = 0.0;                // kg
    double structural_damping = 0.0;  // N/m
    void validate() const;
};

struct SdofViscous {
    double stiffness = 0.0;        // N/m
    double mass = 0.0;             // kg
    double viscous_damping = 0.0;  // N s/m
    void validate() const;
};

/// Eigenvalues are lambda_r = omega_r^2 (1 + i eta_r); shapes are assumed
/// mass-normalized.
struct ModalModel {
    std::vector<double> natural_frequencies;  // rad/s, ascending
    std::vector<double> loss_factors;
    Eigen::MatrixXcd mode_shapes;              // n_dof x n_modes
    std::vector<std::string> dof_labels;

    std::size_t modes() const { return natural_frequencies.size(); }
    std::size_t dofs() const { return static_cast<std::size_t>(mode_shapes.rows()); }
    Complex eigenvalue(std::size_t r) const;
    bool complex_shapes() const;
    void validate() const;

    /// One-mode model whose receptance equals 1 / (k - w^2 m + i h).
    static ModalModel from_sdof(const SdofStructural& sdof);
};

std::vector<double> linear_grid(double lo, double hi, std::size_t points);

FrfCurve sdof_receptance_structural(const SdofStructural& params, std::span<const double> grid);
FrfCurve sdof_receptance_viscous(const SdofViscous& params, std::span<const double> grid);
FrfCurve mdof_receptance(const ModalModel& model, std::size_t j, std::size_t k, std::span<const double> grid);

/// Regenerates a pair that was never measured; same sum as mdof_receptance,
/// tagged Synthesized. Throws when target is already in measured.
FrfCurve synthesize_unmeasured(const ModalModel& model, const std::set<DofPair>& measured, DofPair target,
                               std::span<const double> grid);

/// Receptance -> mobility (i w).
FrfCurve to_mobility(const FrfCurve& curve);
/// Receptance (-w^2) or mobility (i w) -> accelerance.
FrfCurve to_accelerance(const FrfCurve& curve);
/// Inverse of the above; the grid must exclude w = 0.
FrfCurve to_receptance(const FrfCurve& curve);

struct DisplaySeries {
    std::vector<double> amplitude;
    std::vector<double> phase;  // (-pi, pi]
    std::vector<double> real;
    std::vector<double> imag;
};

DisplaySeries display_projections(const FrfCurve& curve);

/// Drive/transfer receptance of a rotor: [K(1 + i eta) + i w (C + Omega G) - w^2 M]^-1 (j, k).
FrfCurve rotor_receptance(const rotor::RotorSystem& system, DofPair dofs, std::span<const double> grid);

/// Laplace-domain forms used by the time-domain simulator. For s = sigma + i w
/// with w >= 0, the hysteretic term keeps the sign it has on the positive axis.
Complex modal_transfer(const ModalModel& model, DofPair dofs, Complex s);
Complex rotor_transfer(const rotor::RotorSystem& system, DofPair dofs, Complex s);

}  // namespace whirlbench::frf
