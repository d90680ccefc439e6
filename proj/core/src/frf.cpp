#include "whirlbench/frf.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "whirlbench/error.hpp"

namespace whirlbench::frf {

namespace {

constexpr Complex kI(0.0, 1.0);

void validate_grid(std::span<const double> grid) {
    if (grid.empty()) throw ValidationError("frequency grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0)
            throw ValidationError(fmt::format("grid point {} must be finite and >= 0", i));
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ValidationError(fmt::format("grid must be strictly increasing (index {})", i));
    }
}

/// 1 / (d + i e) in real arithmetic so the w = 0 value is the closed-form
/// static point bit for bit.
Complex reciprocal(double d, double e, std::size_t index) {
    if (e == 0.0) {
        if (d == 0.0) throw PoleError(index, fmt::format("undamped pole at grid index {}", index));
        return {1.0 / d, 0.0};
    }
    const double denom = d * d + e * e;
    return {d / denom, -e / denom};
}

FrfCurve make_curve(std::span<const double> grid, FrfKind kind, DofPair dofs, Provenance provenance) {
    FrfCurve c;
    c.grid.assign(grid.begin(), grid.end());
    c.values.resize(grid.size());
    c.kind = kind;
    c.dofs = dofs;
    c.provenance = provenance;
    return c;
}

}  // namespace

std::string to_string(FrfKind kind) {
    switch (kind) {
        case FrfKind::Receptance: return "receptance";
        case FrfKind::Mobility: return "mobility";
        case FrfKind::Accelerance: return "accelerance";
    }
    return "receptance";
}

std::string to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::Regenerated: return "regenerated";
        case Provenance::Synthesized: return "synthesized";
        case Provenance::Measured: return "measured";
        case Provenance::Estimated: return "estimated";
    }
    return "regenerated";
}

FrfKind kind_from_string(const std::string& text) {
    if (text == "receptance") return FrfKind::Receptance;
    if (text == "mobility") return FrfKind::Mobility;
    if (text == "accelerance") return FrfKind::Accelerance;
    throw ValidationError("unknown FRF kind '" + text + "'");
}

Provenance provenance_from_string(const std::string& text) {
    if (text == "regenerated") return Provenance::Regenerated;
    if (text == "synthesized") return Provenance::Synthesized;
    if (text == "measured") return Provenance::Measured;
    if (text == "estimated") return Provenance::Estimated;
    throw ValidationError("unknown provenance '" + text + "'");
}

void FrfCurve::validate() const {
    if (values.size() != grid.size()) throw ValidationError("FRF grid and values differ in length");
    validate_grid(grid);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
            throw ValidationError(fmt::format("FRF value at index {} is not finite", i));
}

void SdofStructural::validate() const {
    if (!(stiffness > 0.0) || !(mass > 0.0) || !(structural_damping >= 0.0) || !std::isfinite(stiffness) ||
        !std::isfinite(mass) || !std::isfinite(structural_damping))
        throw ValidationError("SDOF structural parameters require k > 0, m > 0, h >= 0");
}

void SdofViscous::validate() const {
    if (!(stiffness > 0.0) || !(mass > 0.0) || !(viscous_damping >= 0.0) || !std::isfinite(stiffness) ||
        !std::isfinite(mass) || !std::isfinite(viscous_damping))
        throw ValidationError("SDOF viscous parameters require k > 0, m > 0, c >= 0");
}

Complex ModalModel::eigenvalue(std::size_t r) const {
    const double w2 = natural_frequencies.at(r) * natural_frequencies.at(r);
    return {w2, w2 * loss_factors.at(r)};
}

bool ModalModel::complex_shapes() const { return mode_shapes.imag().cwiseAbs().maxCoeff() > 0.0; }

void ModalModel::validate() const {
    if (natural_frequencies.empty()) throw ValidationError("modal model has no modes");
    if (loss_factors.size() != natural_frequencies.size())
        throw ValidationError("modal model needs one loss factor per mode");
    if (static_cast<std::size_t>(mode_shapes.cols()) != natural_frequencies.size())
        throw ValidationError("mode shape matrix must have one column per mode");
    if (mode_shapes.rows() == 0) throw ValidationError("mode shape matrix has no DOFs");
    if (!dof_labels.empty() && dof_labels.size() != dofs())
        throw ValidationError("dof_labels must match mode shape rows");
    for (std::size_t r = 0; r < natural_frequencies.size(); ++r) {
        if (!std::isfinite(natural_frequencies[r]) || !(natural_frequencies[r] > 0.0))
            throw ValidationError(fmt::format("mode {} natural frequency must be > 0", r));
        if (!std::isfinite(loss_factors[r]) || loss_factors[r] < 0.0)
            throw ValidationError(fmt::format("mode {} loss factor must be >= 0", r));
        if (r > 0 && natural_frequencies[r] < natural_frequencies[r - 1])
            throw ValidationError("modes must be ordered by ascending natural frequency");
    }
    if (!mode_shapes.allFinite()) throw ValidationError("mode shapes must be finite");
}

ModalModel ModalModel::from_sdof(const SdofStructural& sdof) {
    sdof.validate();
    ModalModel m;
    m.natural_frequencies = {std::sqrt(sdof.stiffness / sdof.mass)};
    m.loss_factors = {sdof.structural_damping / sdof.stiffness};
    m.mode_shapes = Eigen::MatrixXcd::Constant(1, 1, Complex(1.0 / std::sqrt(sdof.mass), 0.0));
    m.dof_labels = {"1"};
    return m;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0)
        throw ValidationError("linear_grid needs >= 2 points and 0 <= lo < hi");
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
    grid.back() = hi;
    return grid;
}

FrfCurve sdof_receptance_structural(const SdofStructural& p, std::span<const double> grid) {
    p.validate();
    validate_grid(grid);
    auto curve = make_curve(grid, FrfKind::Receptance, {0, 0}, Provenance::Regenerated);
    for (std::size_t i = 0; i < grid.size(); ++i)
        curve.values[i] = reciprocal(p.stiffness - grid[i] * grid[i] * p.mass, p.structural_damping, i);
    curve.metadata["damping"] = "structural";
    return curve;
}

FrfCurve sdof_receptance_viscous(const SdofViscous& p, std::span<const double> grid) {
    p.validate();
    validate_grid(grid);
    auto curve = make_curve(grid, FrfKind::Receptance, {0, 0}, Provenance::Regenerated);
    for (std::size_t i = 0; i < grid.size(); ++i)
        curve.values[i] = reciprocal(p.stiffness - grid[i] * grid[i] * p.mass, grid[i] * p.viscous_damping, i);
    curve.metadata["damping"] = "viscous";
    return curve;
}

FrfCurve mdof_receptance(const ModalModel& model, std::size_t j, std::size_t k, std::span<const double> grid) {
    model.validate();
    validate_grid(grid);
    if (j >= model.dofs() || k >= model.dofs())
        throw ValidationError(fmt::format("DOF pair ({}, {}) outside the {}-DOF mode shape matrix", j, k, model.dofs()));
    auto curve = make_curve(grid, FrfKind::Receptance, {j, k}, Provenance::Regenerated);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w2 = grid[i] * grid[i];
        Complex sum = 0.0;
        for (std::size_t r = 0; r < model.modes(); ++r) {
            const Complex denom = model.eigenvalue(r) - w2;
            if (denom == Complex(0.0, 0.0)) throw PoleError(i, fmt::format("undamped pole of mode {} at grid index {}", r, i));
            const auto ri = static_cast<Eigen::Index>(r);
            sum += model.mode_shapes(static_cast<Eigen::Index>(j), ri) * model.mode_shapes(static_cast<Eigen::Index>(k), ri) / denom;
        }
        curve.values[i] = sum;
    }
    curve.metadata["normalization"] = "mass-normalized";
    curve.metadata["mode_shapes"] = model.complex_shapes() ? "complex" : "real";
    return curve;
}

FrfCurve synthesize_unmeasured(const ModalModel& model, const std::set<DofPair>& measured, DofPair target,
                               std::span<const double> grid) {
    if (measured.contains(target))
        throw ValidationError(fmt::format("pair ({}, {}) was measured; regenerate it with mdof_receptance instead",
                                          target.response, target.reference));
    auto curve = mdof_receptance(model, target.response, target.reference, grid);
    curve.provenance = Provenance::Synthesized;
    return curve;
}

FrfCurve to_mobility(const FrfCurve& curve) {
    if (curve.kind != FrfKind::Receptance)
        throw ValidationError("to_mobility: kind mismatch, expected receptance but got " + to_string(curve.kind));
    FrfCurve out = curve;
    out.kind = FrfKind::Mobility;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = Complex(0.0, curve.grid[i]) * curve.values[i];
    return out;
}

FrfCurve to_accelerance(const FrfCurve& curve) {
    FrfCurve out = curve;
    out.kind = FrfKind::Accelerance;
    if (curve.kind == FrfKind::Receptance) {
        for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = -(curve.grid[i] * curve.grid[i]) * curve.values[i];
    } else if (curve.kind == FrfKind::Mobility) {
        for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = Complex(0.0, curve.grid[i]) * curve.values[i];
    } else {
        throw ValidationError("to_accelerance: kind mismatch, input is already accelerance");
    }
    return out;
}

FrfCurve to_receptance(const FrfCurve& curve) {
    if (curve.kind == FrfKind::Receptance) return curve;
    FrfCurve out = curve;
    out.kind = FrfKind::Receptance;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double w = curve.grid[i];
        if (w == 0.0) throw ValidationError("to_receptance: grid contains w = 0");
        const Complex factor = curve.kind == FrfKind::Mobility ? kI * w : Complex(-w * w, 0.0);
        out.values[i] = curve.values[i] / factor;
    }
    return out;
}

DisplaySeries display_projections(const FrfCurve& curve) {
    DisplaySeries d;
    d.amplitude.reserve(curve.size());
    d.phase.reserve(curve.size());
    d.real.reserve(curve.size());
    d.imag.reserve(curve.size());
    for (const Complex& v : curve.values) {
        d.amplitude.push_back(std::abs(v));
        // atan2 returns -pi for (-x, -0); fold onto +pi to stay in (-pi, pi].
        double phase = std::arg(v);
        if (phase == -std::numbers::pi) phase = std::numbers::pi;
        d.phase.push_back(phase);
        d.real.push_back(v.real());
        d.imag.push_back(v.imag());
    }
    return d;
}

Complex modal_transfer(const ModalModel& model, DofPair dofs, Complex s) {
    Complex sum = 0.0;
    const Complex s2 = s * s;
    for (std::size_t r = 0; r < model.modes(); ++r) {
        const auto ri = static_cast<Eigen::Index>(r);
        sum += model.mode_shapes(static_cast<Eigen::Index>(dofs.response), ri) *
               model.mode_shapes(static_cast<Eigen::Index>(dofs.reference), ri) / (model.eigenvalue(r) + s2);
    }
    return sum;
}

Complex rotor_transfer(const rotor::RotorSystem& system, DofPair dofs, Complex s) {
    const auto n = static_cast<Eigen::Index>(system.dofs());
    const Eigen::MatrixXcd z = system.mass.cast<Complex>() * (s * s) +
                               (system.damping + system.spin_speed * system.gyroscopic).cast<Complex>() * s +
                               system.stiffness.cast<Complex>() * Complex(1.0, system.loss_factor);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(static_cast<Eigen::Index>(dofs.reference)) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(z);
    if (!lu.isInvertible()) return {std::numeric_limits<double>::infinity(), 0.0};
    const Eigen::VectorXcd x = lu.solve(rhs);
    return x(static_cast<Eigen::Index>(dofs.response));
}

FrfCurve rotor_receptance(const rotor::RotorSystem& system, DofPair dofs, std::span<const double> grid) {
    system.validate();
    validate_grid(grid);
    if (dofs.response >= system.dofs() || dofs.reference >= system.dofs())
        throw ValidationError("rotor_receptance: DOF index out of range");
    auto curve = make_curve(grid, FrfKind::Receptance, dofs, Provenance::Regenerated);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex v = rotor_transfer(system, dofs, Complex(0.0, grid[i]));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw PoleError(i, fmt::format("undamped rotor pole at grid index {}", i));
        curve.values[i] = v;
    }
    curve.metadata["source"] = "rotor";
    curve.metadata["spin_speed_rad_s"] = fmt::format("{:.9g}", system.spin_speed);
    return curve;
}

}  // namespace whirlbench::frf
