#include "whirlbench/rotor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "whirlbench/error.hpp"
#include "whirlbench/units.hpp"

namespace whirlbench::rotor {

namespace {

constexpr double kDegenerateTolerance = 1e-8;
// Rayleigh equivalent mass of a pinned-pinned shaft at midspan.
constexpr double kShaftMassFraction = 17.0 / 35.0;

int direction_rank(WhirlDirection d) {
    switch (d) {
        case WhirlDirection::Backward: return 0;
        case WhirlDirection::Planar: return 1;
        case WhirlDirection::Forward: return 2;
    }
    return 1;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

Eigen::VectorXcd normalized(Eigen::VectorXcd v) {
    const double norm = v.norm();
    if (norm == 0.0) return v;
    v /= norm;
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    const std::complex<double> phase = std::conj(v(pivot)) / std::abs(v(pivot));
    v *= phase;
    v(pivot) = std::abs(v(pivot));
    return v;
}

/// Hermitian form whose quadratic value sums Im(v_y conj(v_z)) over all pairs.
Eigen::MatrixXcd orbit_form(std::size_t n, const std::vector<DofIndexPair>& pairs) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const std::complex<double> half_i(0.0, 0.5);
    for (const auto& [y, z] : pairs) {
        s(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(y)) += -half_i;
        s(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z)) += half_i;
    }
    return s;
}

WhirlDirection classify_mode(const Eigen::VectorXcd& v, const std::vector<DofIndexPair>& pairs) {
    if (pairs.empty()) return WhirlDirection::Planar;
    DofIndexPair best = pairs.front();
    double best_amp = -1.0;
    for (const auto& p : pairs) {
        const double amp = std::norm(v(static_cast<Eigen::Index>(p.first))) +
                           std::norm(v(static_cast<Eigen::Index>(p.second)));
        if (amp > best_amp) {
            best_amp = amp;
            best = p;
        }
    }
    if (best_amp <= 0.0) return WhirlDirection::Planar;
    return classify_whirl(v, best);
}

Eigen::MatrixXd companion_matrix(const RotorSystem& system) {
    const auto n = static_cast<Eigen::Index>(system.dofs());
    Eigen::LLT<Eigen::MatrixXd> llt(system.mass);
    if (llt.info() != Eigen::Success) throw NumericError("singular mass matrix");
    const Eigen::MatrixXd minv_k = llt.solve(system.stiffness);
    const Eigen::MatrixXd minv_d = llt.solve(system.damping + system.spin_speed * system.gyroscopic);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n).setIdentity();
    a.bottomLeftCorner(n, n) = -minv_k;
    a.bottomRightCorner(n, n) = -minv_d;
    return a;
}

}  // namespace

std::string to_string(Lateral direction) {
    switch (direction) {
        case Lateral::Y: return "y";
        case Lateral::Z: return "z";
        case Lateral::TiltY: return "tilt_y";
        case Lateral::TiltZ: return "tilt_z";
    }
    return "y";
}

Lateral lateral_from_string(const std::string& text) {
    if (text == "y") return Lateral::Y;
    if (text == "z") return Lateral::Z;
    if (text == "tilt_y") return Lateral::TiltY;
    if (text == "tilt_z") return Lateral::TiltZ;
    throw ValidationError("unknown lateral direction '" + text + "'");
}

std::string to_string(WhirlDirection direction) {
    switch (direction) {
        case WhirlDirection::Forward: return "FW";
        case WhirlDirection::Backward: return "BW";
        case WhirlDirection::Planar: return "planar";
    }
    return "planar";
}

void RotorSystem::validate() const {
    const auto n = mass.rows();
    require(n > 0 && mass.cols() == n, "mass matrix must be square and non-empty");
    require(stiffness.rows() == n && stiffness.cols() == n, "stiffness matrix dimension mismatch");
    require(damping.rows() == n && damping.cols() == n, "damping matrix dimension mismatch");
    require(gyroscopic.rows() == n && gyroscopic.cols() == n, "gyroscopic matrix dimension mismatch");
    require(mass.allFinite() && stiffness.allFinite() && damping.allFinite() && gyroscopic.allFinite(),
            "system matrices must be finite");
    require(std::isfinite(spin_speed) && spin_speed >= 0.0, "spin_speed must be >= 0");
    require(std::isfinite(loss_factor) && loss_factor >= 0.0, "loss_factor must be >= 0");
    require(dof_labels.size() == static_cast<std::size_t>(n), "dof_labels must have one entry per DOF");
    for (std::size_t i = 0; i < dof_labels.size(); ++i)
        for (std::size_t j = i + 1; j < dof_labels.size(); ++j)
            require(!(dof_labels[i] == dof_labels[j]), "duplicate DOF label");

    const double eps = std::numeric_limits<double>::epsilon();
    const double m_scale = mass.cwiseAbs().maxCoeff();
    require((mass - mass.transpose()).cwiseAbs().maxCoeff() <= 8 * eps * m_scale, "mass matrix must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    require(llt.info() == Eigen::Success, "mass matrix must be positive definite (singular mass matrix)");

    const double k_scale = std::max(stiffness.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    require((stiffness - stiffness.transpose()).cwiseAbs().maxCoeff() <= 8 * eps * k_scale,
            "stiffness matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> k_eig(stiffness, Eigen::EigenvaluesOnly);
    require(k_eig.eigenvalues().minCoeff() >= -1e-12 * k_scale, "stiffness matrix must be positive semi-definite");

    const double g_scale = gyroscopic.cwiseAbs().maxCoeff();
    require((gyroscopic + gyroscopic.transpose()).cwiseAbs().maxCoeff() <= 4 * eps * g_scale,
            "gyroscopic matrix must be skew-symmetric");
}

std::vector<DofIndexPair> RotorSystem::whirl_pairs() const {
    std::vector<DofIndexPair> pairs;
    auto find = [&](int node, Lateral dir) -> std::ptrdiff_t {
        for (std::size_t i = 0; i < dof_labels.size(); ++i)
            if (dof_labels[i].node == node && dof_labels[i].direction == dir) return static_cast<std::ptrdiff_t>(i);
        return -1;
    };
    for (std::size_t i = 0; i < dof_labels.size(); ++i) {
        const auto& label = dof_labels[i];
        Lateral partner;
        if (label.direction == Lateral::Y) partner = Lateral::Z;
        else if (label.direction == Lateral::TiltY) partner = Lateral::TiltZ;
        else continue;
        const auto j = find(label.node, partner);
        if (j >= 0) pairs.emplace_back(i, static_cast<std::size_t>(j));
    }
    return pairs;
}

std::size_t RotorSystem::index_of(const DofLabel& label) const {
    for (std::size_t i = 0; i < dof_labels.size(); ++i)
        if (dof_labels[i] == label) return i;
    throw ValidationError(fmt::format("no DOF at node {} direction {}", label.node, to_string(label.direction)));
}

bool RotorSystem::undamped() const { return loss_factor == 0.0 && damping.cwiseAbs().maxCoeff() == 0.0; }

RotorParameters RotorParameters::from_overrides(const std::map<std::string, double>& overrides) {
    RotorParameters p;
    auto positive = [](const std::string& key, double v) {
        if (!std::isfinite(v) || v <= 0.0) throw ValidationError(fmt::format("override '{}' must be positive", key));
        return v;
    };
    auto non_negative = [](const std::string& key, double v) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError(fmt::format("override '{}' must be >= 0", key));
        return v;
    };
    for (const auto& [key, value] : overrides) {
        if (key == "shaft_diameter") p.shaft_diameter = positive(key, value);
        else if (key == "shaft_length") p.shaft_length = positive(key, value);
        else if (key == "shaft_density") p.shaft_density = positive(key, value);
        else if (key == "shaft_modulus") p.shaft_modulus = positive(key, value);
        else if (key == "disk_mass") p.disk_mass = positive(key, value);
        else if (key == "disk_polar_inertia") p.disk_polar_inertia = positive(key, value);
        else if (key == "disk_diametral_inertia") p.disk_diametral_inertia = positive(key, value);
        else if (key == "disk_position") {
            if (!(value > 0.0 && value < 1.0))
                throw ValidationError("override 'disk_position' must lie strictly between 0 and 1");
            p.disk_position = value;
        } else if (key == "loss_factor") p.loss_factor = non_negative(key, value);
        else if (key == "stiffness_damping") p.stiffness_damping = non_negative(key, value);
        else if (key == "spin_speed") p.spin_speed = non_negative(key, value);
        else if (key == "spin_speed_rpm") p.spin_speed = rpm_to_rad_per_s(non_negative(key, value));
        else throw ValidationError(fmt::format("unrecognized override '{}'", key));
    }
    return p;
}

double RotorParameters::diametral_inertia() const {
    if (disk_diametral_inertia > 0.0) return disk_diametral_inertia;
    // Thin disk of the shaft material: radius from the polar inertia, thickness from the mass.
    const double radius_sq = 2.0 * disk_polar_inertia / disk_mass;
    const double thickness = disk_mass / (shaft_density * std::numbers::pi * radius_sq);
    return disk_mass * (3.0 * radius_sq + thickness * thickness) / 12.0;
}

double RotorParameters::shaft_mass() const {
    const double area = std::numbers::pi * shaft_diameter * shaft_diameter / 4.0;
    return shaft_density * area * shaft_length;
}

Eigen::Matrix2d RotorParameters::station_stiffness() const {
    const double ei = shaft_modulus * std::numbers::pi * std::pow(shaft_diameter, 4) / 64.0;
    const double l = shaft_length;
    const double a = disk_position * l;
    const double b = l - a;
    const double scale = 1.0 / (3.0 * ei * l);
    Eigen::Matrix2d flexibility;
    flexibility << a * a * b * b * scale, a * b * (b - a) * scale,
                   a * b * (b - a) * scale, (a * a - a * b + b * b) * scale;
    return flexibility.inverse();
}

RotorSystem build_rotor(const RotorParameters& p) {
    const double m = p.disk_mass + kShaftMassFraction * p.shaft_mass();
    const double id = p.diametral_inertia();
    const Eigen::Matrix2d ks = p.station_stiffness();

    RotorSystem s;
    s.mass = Eigen::Vector4d(m, m, id, id).asDiagonal();
    s.stiffness = Eigen::MatrixXd::Zero(4, 4);
    for (int plane = 0; plane < 2; ++plane) {
        const int t = plane;      // Y or Z
        const int r = plane + 2;  // TiltY or TiltZ
        s.stiffness(t, t) = ks(0, 0);
        s.stiffness(t, r) = ks(0, 1);
        s.stiffness(r, t) = ks(1, 0);
        s.stiffness(r, r) = ks(1, 1);
    }
    s.stiffness = 0.5 * (s.stiffness + s.stiffness.transpose()).eval();
    s.gyroscopic = Eigen::MatrixXd::Zero(4, 4);
    s.gyroscopic(2, 3) = p.disk_polar_inertia;
    s.gyroscopic(3, 2) = -p.disk_polar_inertia;
    s.damping = p.stiffness_damping * s.stiffness;
    s.spin_speed = p.spin_speed;
    s.loss_factor = p.loss_factor;
    s.dof_labels = {{2, Lateral::Y}, {2, Lateral::Z}, {2, Lateral::TiltY}, {2, Lateral::TiltZ}};
    s.validate();
    return s;
}

RotorSystem build_default_rotor(const std::map<std::string, double>& overrides) {
    return build_rotor(RotorParameters::from_overrides(overrides));
}

RotorSystem isotropic_point_rotor(double mass, double stiffness, double gyro, double spin_speed) {
    RotorSystem s;
    s.mass = mass * Eigen::MatrixXd::Identity(2, 2);
    s.stiffness = stiffness * Eigen::MatrixXd::Identity(2, 2);
    s.damping = Eigen::MatrixXd::Zero(2, 2);
    s.gyroscopic = Eigen::MatrixXd::Zero(2, 2);
    s.gyroscopic(0, 1) = gyro;
    s.gyroscopic(1, 0) = -gyro;
    s.spin_speed = spin_speed;
    s.dof_labels = {{1, Lateral::Y}, {1, Lateral::Z}};
    s.validate();
    return s;
}

WhirlDirection classify_whirl(const Eigen::VectorXcd& v, DofIndexPair dof_pair) {
    const auto [iy, iz] = dof_pair;
    if (iy >= static_cast<std::size_t>(v.size()) || iz >= static_cast<std::size_t>(v.size()) || iy == iz)
        throw ValidationError("dof_pair must index two distinct entries of the eigenvector");
    if (v.cwiseAbs().maxCoeff() == 0.0) throw ValidationError("zero eigenvector cannot be classified");
    const std::complex<double> vy = v(static_cast<Eigen::Index>(iy));
    const std::complex<double> vz = v(static_cast<Eigen::Index>(iz));
    const double sense = std::imag(vy * std::conj(vz));
    const double scale = std::norm(vy) + std::norm(vz);
    if (std::abs(sense) < kPlanarThreshold * scale || scale == 0.0) return WhirlDirection::Planar;
    return sense > 0.0 ? WhirlDirection::Forward : WhirlDirection::Backward;
}

Eigen::VectorXcd companion_eigenvalues(const RotorSystem& system) {
    system.validate();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion_matrix(system), false);
    if (es.info() != Eigen::Success)
        throw NumericError(fmt::format("eigen-solver did not converge (state dimension {}, iteration cap {})",
                                       2 * system.dofs(), 40 * 2 * system.dofs()));
    return es.eigenvalues();
}

std::vector<WhirlMode> whirl_eigen(const RotorSystem& system) {
    system.validate();
    const auto n = static_cast<Eigen::Index>(system.dofs());
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion_matrix(system), true);
    if (es.info() != Eigen::Success)
        throw NumericError(fmt::format("eigen-solver did not converge (state dimension {}, iteration cap {})",
                                       2 * n, 40 * 2 * n));
    const Eigen::VectorXcd values = es.eigenvalues();
    const Eigen::MatrixXcd vectors = es.eigenvectors();

    std::vector<WhirlMode> modes;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i).imag() <= 0.0) continue;  // conjugate twin or overdamped root
        WhirlMode m;
        m.eigenvalue = values(i);
        m.frequency = values(i).imag();
        m.eigenvector = normalized(vectors.col(i).head(n));
        modes.push_back(std::move(m));
    }
    std::sort(modes.begin(), modes.end(), [](const WhirlMode& a, const WhirlMode& b) { return a.frequency < b.frequency; });

    const auto pairs = system.whirl_pairs();
    const Eigen::MatrixXcd form = orbit_form(system.dofs(), pairs);

    // Coincident roots span a degenerate eigenspace; rotate it onto the
    // extremes of the orbit-sense form so each member whirls circularly.
    for (std::size_t start = 0; start < modes.size();) {
        std::size_t end = start + 1;
        while (end < modes.size() &&
               std::abs(modes[end].eigenvalue - modes[start].eigenvalue) <=
                   kDegenerateTolerance * std::abs(modes[start].eigenvalue))
            ++end;
        const std::size_t count = end - start;
        if (count > 1 && !pairs.empty()) {
            Eigen::MatrixXcd basis(n, static_cast<Eigen::Index>(count));
            std::complex<double> mean = 0.0;
            for (std::size_t c = 0; c < count; ++c) {
                basis.col(static_cast<Eigen::Index>(c)) = modes[start + c].eigenvector;
                mean += modes[start + c].eigenvalue;
            }
            mean /= static_cast<double>(count);
            const Eigen::MatrixXcd b = basis.adjoint() * form * basis;
            const Eigen::MatrixXcd g = basis.adjoint() * basis;
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(0.5 * (b + b.adjoint()), 0.5 * (g + g.adjoint()));
            if (ges.info() == Eigen::Success) {
                for (std::size_t c = 0; c < count; ++c) {
                    modes[start + c].eigenvector = normalized(basis * ges.eigenvectors().col(static_cast<Eigen::Index>(c)));
                    modes[start + c].eigenvalue = mean;
                    modes[start + c].frequency = mean.imag();
                }
            }
        }
        start = end;
    }

    for (auto& m : modes) {
        m.damping_ratio = -m.eigenvalue.real() / std::abs(m.eigenvalue);
        m.direction = classify_mode(m.eigenvector, pairs);
    }
    std::stable_sort(modes.begin(), modes.end(), [](const WhirlMode& a, const WhirlMode& b) {
        const bool same = std::abs(a.frequency - b.frequency) <= kDegenerateTolerance * std::max(a.frequency, b.frequency);
        if (same) return direction_rank(a.direction) < direction_rank(b.direction);
        return a.frequency < b.frequency;
    });
    return modes;
}

CampbellDiagram campbell(const RotorSystem& system, std::span<const double> speeds) {
    if (speeds.empty()) throw ValidationError("campbell: speed list is empty");
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        if (!std::isfinite(speeds[i]) || speeds[i] < 0.0) throw ValidationError("campbell: speeds must be >= 0");
        if (i > 0 && !(speeds[i] > speeds[i - 1])) throw ValidationError("campbell: speeds must be strictly increasing");
    }

    CampbellDiagram diagram;
    diagram.spin_speeds.assign(speeds.begin(), speeds.end());

    std::vector<Eigen::VectorXcd> last_vectors;
    for (std::size_t s = 0; s < speeds.size(); ++s) {
        RotorSystem at_speed = system;
        at_speed.spin_speed = speeds[s];
        const auto modes = whirl_eigen(at_speed);

        if (s == 0) {
            for (std::size_t i = 0; i < modes.size(); ++i) {
                diagram.branches.push_back({static_cast<int>(i), modes[i].direction, {modes[i].frequency}});
                last_vectors.push_back(modes[i].eigenvector);
            }
            continue;
        }
        const std::size_t nb = diagram.branches.size();
        if (modes.size() != nb)
            throw NumericError(fmt::format("campbell: mode count changed from {} to {} at speed {}", nb, modes.size(), speeds[s]));

        std::vector<double> predicted(nb);
        double scale = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& f = diagram.branches[b].frequencies;
            predicted[b] = f.back();
            if (f.size() >= 2) {
                const double slope = (f[f.size() - 1] - f[f.size() - 2]) / (speeds[s - 1] - speeds[s - 2]);
                predicted[b] = f.back() + slope * (speeds[s] - speeds[s - 1]);
            }
            scale = std::max(scale, f.back());
        }
        scale = std::max(scale, 1.0);

        auto cost_of = [&](std::size_t b, std::size_t m) {
            // Squared distance: an absolute-value sum ties every permutation
            // whenever all modes sit on one side of all predictions.
            const double d = (modes[m].frequency - predicted[b]) / scale;
            double c = d * d;
            const auto bd = diagram.branches[b].direction;
            const auto md = modes[m].direction;
            if (bd != WhirlDirection::Planar && md != WhirlDirection::Planar && bd != md) c += 1e6;
            return c;
        };
        auto correlation_of = [&](const std::vector<std::size_t>& perm) {
            double sum = 0.0;
            for (std::size_t b = 0; b < nb; ++b) sum += std::abs(last_vectors[b].dot(modes[perm[b]].eigenvector));
            return sum;
        };

        std::vector<std::size_t> assignment(nb);
        std::iota(assignment.begin(), assignment.end(), 0);
        if (nb <= 8) {
            std::vector<std::size_t> perm = assignment;
            double best = std::numeric_limits<double>::infinity();
            std::vector<std::vector<std::size_t>> ties;
            do {
                double c = 0.0;
                for (std::size_t b = 0; b < nb; ++b) c += cost_of(b, perm[b]);
                if (ties.empty() || c < best - 1e-12 * (1.0 + best)) {
                    best = c;
                    ties.assign(1, perm);
                } else if (std::abs(c - best) <= 1e-12 * (1.0 + best)) {
                    ties.push_back(perm);
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            assignment = ties.front();
            if (ties.size() > 1) {
                double best_corr = -1.0;
                for (const auto& candidate : ties) {
                    const double corr = correlation_of(candidate);
                    if (corr > best_corr) {
                        best_corr = corr;
                        assignment = candidate;
                    }
                }
                diagram.diagnostics.push_back(fmt::format(
                    "speed {:.9g} rad/s: {} equidistant continuations, chose eigenvector correlation {:.9g}",
                    speeds[s], ties.size(), best_corr));
            }
        } else {
            std::vector<bool> taken(nb, false);
            for (std::size_t b = 0; b < nb; ++b) {
                std::size_t pick = nb;
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t m = 0; m < nb; ++m) {
                    if (taken[m]) continue;
                    const double c = cost_of(b, m);
                    if (c < best) {
                        best = c;
                        pick = m;
                    }
                }
                taken[pick] = true;
                assignment[b] = pick;
            }
        }

        for (std::size_t b = 0; b < nb; ++b) {
            const auto& mode = modes[assignment[b]];
            auto& branch = diagram.branches[b];
            branch.frequencies.push_back(mode.frequency);
            if (branch.direction == WhirlDirection::Planar) branch.direction = mode.direction;
            last_vectors[b] = mode.eigenvector;
        }
    }
    return diagram;
}

std::vector<HystereticMode> hysteretic_modes(const RotorSystem& system) {
    system.validate();
    const auto n = static_cast<Eigen::Index>(system.dofs());
    Eigen::LLT<Eigen::MatrixXd> llt(system.mass);
    const std::complex<double> complex_stiffness(1.0, system.loss_factor);
    const Eigen::MatrixXcd minv_k = llt.solve(system.stiffness).cast<std::complex<double>>() * complex_stiffness;
    const Eigen::MatrixXd minv_d = llt.solve(system.damping + system.spin_speed * system.gyroscopic);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n).setIdentity();
    a.bottomLeftCorner(n, n) = -minv_k;
    a.bottomRightCorner(n, n) = -minv_d.cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
    if (es.info() != Eigen::Success) throw NumericError("complex eigen-solver did not converge");

    std::vector<HystereticMode> modes;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> s = es.eigenvalues()(i);
        if (s.imag() <= 0.0) continue;
        const std::complex<double> w = s * std::complex<double>(0.0, -1.0);
        const std::complex<double> w2 = w * w;
        if (w2.real() <= 0.0) continue;
        modes.push_back({std::sqrt(w2.real()), w2.imag() / w2.real()});
    }
    std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.frequency < b.frequency; });
    return modes;
}

}  // namespace whirlbench::rotor
