#include "whirlbench/nyquist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "whirlbench/error.hpp"

namespace whirlbench::nyquist {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::size_t> band_indices(const frf::FrfCurve& curve, Band band) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve.grid[i] >= band.lo && curve.grid[i] <= band.hi) idx.push_back(i);
    return idx;
}

std::vector<double> unwrapped_angles(std::span<const Complex> points, Complex center) {
    std::vector<double> theta(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        theta[i] = std::arg(points[i] - center);
        if (i > 0) {
            double d = theta[i] - theta[i - 1];
            while (d > kPi) d -= 2 * kPi;
            while (d < -kPi) d += 2 * kPi;
            theta[i] = theta[i - 1] + d;
        }
    }
    return theta;
}

struct CircleParams {
    double a = 0.0, b = 0.0, r = 0.0;
};

double geometric_cost(const std::vector<Eigen::Vector2d>& u, const CircleParams& p) {
    double cost = 0.0;
    for (const auto& q : u) {
        const double d = std::hypot(q.x() - p.a, q.y() - p.b) - p.r;
        cost += d * d;
    }
    return cost;
}

}  // namespace

double relative_noise(std::span<const Complex> points) {
    const std::size_t m = points.size();
    if (m < 9) return 0.0;
    std::vector<double> rel;
    for (std::size_t j = 1; j + 1 < m; ++j) {
        const double a = std::abs(points[j]);
        if (a > 0.0) rel.push_back(std::abs(points[j + 1] - 2.0 * points[j] + points[j - 1]) / a);
    }
    if (rel.empty()) return 0.0;
    std::nth_element(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(rel.size() / 2), rel.end());
    // Median of a Rayleigh variable: 2.04 eps for relative noise eps.
    return rel[rel.size() / 2] / 2.04;
}

std::size_t noise_span(std::span<const Complex> points) {
    const std::size_t m = points.size();
    const double eps = relative_noise(points);
    if (eps == 0.0) return 1;
    double largest = 0.0;
    for (const auto& p : points) largest = std::max(largest, std::abs(p));
    const double chord_noise = std::sqrt(2.0) * eps * largest;
    const std::size_t limit = std::max<std::size_t>(1, m / 8);
    for (std::size_t k = 1; k <= limit; ++k) {
        double chord = 0.0;
        for (std::size_t j = 0; j + k < m; ++j) chord = std::max(chord, std::abs(points[j + k] - points[j]));
        if (chord_noise <= kChordNoiseRatio * chord) return k;
    }
    return limit;
}

std::vector<NyquistPoint> nyquist_points(const frf::FrfCurve& curve) {
    std::vector<NyquistPoint> out;
    out.reserve(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) out.push_back({curve.values[i], curve.grid[i]});
    return out;
}

std::vector<NyquistPoint> nyquist_points(const frf::FrfCurve& curve, Band band) {
    std::vector<NyquistPoint> out;
    for (std::size_t i : band_indices(curve, band)) out.push_back({curve.values[i], curve.grid[i]});
    return out;
}

NyquistCircle fit_circle(std::span<const Complex> points) {
    const std::size_t m = points.size();
    if (m < 5) throw ValidationError(fmt::format("circle fit needs at least 5 points, got {}", m));
    for (std::size_t i = 0; i < m; ++i)
        if (!std::isfinite(points[i].real()) || !std::isfinite(points[i].imag()))
            throw ValidationError(fmt::format("circle fit point {} is not finite", i));

    // Work in centred, unit-RMS coordinates.
    Complex mean = 0.0;
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(m);
    double scale = 0.0;
    for (const auto& p : points) scale += std::norm(p - mean);
    scale = std::sqrt(scale / static_cast<double>(m));
    if (!(scale > 0.0)) throw ValidationError("degenerate configuration: all points coincide");

    std::vector<Eigen::Vector2d> u(m);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < m; ++i) {
        const Complex q = (points[i] - mean) / scale;
        u[i] = {q.real(), q.imag()};
        cov += u[i] * u[i].transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> cov_eig(cov);
    if (cov_eig.eigenvalues()(0) <= 1e-12 * cov_eig.eigenvalues()(1))
        throw ValidationError("degenerate configuration: points are collinear");

    Eigen::MatrixXd a(static_cast<Eigen::Index>(m), 3);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        a(row, 0) = u[i].x();
        a(row, 1) = u[i].y();
        a(row, 2) = 1.0;
        rhs(row) = -u[i].squaredNorm();
    }
    const Eigen::Vector3d def = a.colPivHouseholderQr().solve(rhs);
    CircleParams p{-def(0) / 2.0, -def(1) / 2.0, 0.0};
    const double r2 = p.a * p.a + p.b * p.b - def(2);
    if (!(r2 > 0.0) || !std::isfinite(r2)) throw ValidationError("degenerate configuration: no real circle");
    p.r = std::sqrt(r2);
    if (p.r > 1e8) throw ValidationError("degenerate configuration: points are collinear");

    const CircleParams algebraic = p;
    double cost = geometric_cost(u, p);
    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    for (; iter < kMaxRefineIterations && !converged; ++iter) {
        if (cost <= 1e-28 * static_cast<double>(m)) {
            converged = true;
            break;
        }
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (const auto& q : u) {
            const double dx = q.x() - p.a;
            const double dy = q.y() - p.b;
            const double d = std::hypot(dx, dy);
            if (d == 0.0) continue;
            const Eigen::Vector3d j(-dx / d, -dy / d, -1.0);
            const double res = d - p.r;
            jtj += j * j.transpose();
            jtr += j * res;
        }
        for (;;) {
            Eigen::Matrix3d damped = jtj;
            for (int k = 0; k < 3; ++k) damped(k, k) *= 1.0 + lambda;
            const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
            const CircleParams trial{p.a + step(0), p.b + step(1), p.r + step(2)};
            const double trial_cost = geometric_cost(u, trial);
            const double size = 1.0 + std::abs(p.a) + std::abs(p.b) + std::abs(p.r);
            if (trial_cost <= cost) {
                const bool tiny = step.norm() <= 1e-13 * size || cost - trial_cost <= 1e-15 * cost;
                p = trial;
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                converged = tiny;
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e12) {
                // No descent direction left at working precision.
                converged = true;
                break;
            }
        }
    }

    NyquistCircle circle;
    if (!converged || !(p.r > 0.0)) {
        p = algebraic;
        cost = geometric_cost(u, p);
        circle.converged = false;
    }
    circle.center = mean + scale * Complex(p.a, p.b);
    circle.radius = scale * p.r;
    circle.rms_residual = scale * std::sqrt(cost / static_cast<double>(m));
    circle.iterations = iter;
    circle.arc_points.resize(m);
    for (std::size_t i = 0; i < m; ++i) circle.arc_points[i] = i;
    return circle;
}

ModeEstimate extract_mode(const frf::FrfCurve& curve, Band band) {
    curve.validate();
    if (curve.kind != frf::FrfKind::Receptance)
        throw ValidationError("extract_mode expects a receptance curve, got " + frf::to_string(curve.kind));
    const auto idx = band_indices(curve, band);
    if (idx.size() < 9)
        throw ValidationError(fmt::format("band [{:.6g}, {:.6g}] rad/s holds {} grid points; at least 9 are needed",
                                          band.lo, band.hi, idx.size()));
    const std::size_t m = idx.size();
    std::vector<Complex> pts(m);
    std::vector<double> w2(m);
    for (std::size_t i = 0; i < m; ++i) {
        pts[i] = curve.values[idx[i]];
        w2[i] = curve.grid[idx[i]] * curve.grid[idx[i]];
    }

    NyquistCircle circle = fit_circle(pts);
    circle.arc_points = idx;
    const auto theta = unwrapped_angles(pts, circle.center);

    const std::size_t span = noise_span(pts);
    std::vector<double> rate(m - span), mid(m - span);
    for (std::size_t j = 0; j + span < m; ++j) {
        rate[j] = std::abs(theta[j + span] - theta[j]) / (w2[j + span] - w2[j]);
        mid[j] = 0.5 * (w2[j] + w2[j + span]);
    }
    const auto peak = static_cast<std::size_t>(std::max_element(rate.begin(), rate.end()) - rate.begin());
    if (rate.size() < 3 || peak == 0 || peak + 1 >= rate.size())
        throw ValidationError("band selection: no sweep-rate maximum interior to the band");

    // For a modal circle 1 / (d theta / d w^2) is quadratic in w^2 with its
    // vertex at w_r^2. Fit it over the contiguous run above half the peak rate.
    std::size_t first = peak, last = peak;
    while (first > 0 && rate[first - 1] >= 0.5 * rate[peak]) --first;
    while (last + 1 < rate.size() && rate[last + 1] >= 0.5 * rate[peak]) ++last;
    if (last - first < 2) {
        first = peak - 1;
        last = peak + 1;
    }
    double w2r = mid[peak];
    {
        const double x0 = mid[peak];
        const double scale = mid[last] - mid[first];
        Eigen::MatrixXd a(static_cast<Eigen::Index>(last - first + 1), 3);
        Eigen::VectorXd b(a.rows());
        for (std::size_t j = first; j <= last; ++j) {
            const auto row = static_cast<Eigen::Index>(j - first);
            const double x = (mid[j] - x0) / scale;
            a(row, 0) = 1.0;
            a(row, 1) = x;
            a(row, 2) = x * x;
            b(row) = rate[peak] / rate[j];
        }
        const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
        if (c(2) > 0.0) w2r = std::clamp(x0 - scale * c(1) / (2.0 * c(2)), mid[first], mid[last]);
    }

    // Reference angle at w_r^2 by linear interpolation along the arc.
    std::size_t seg = 0;
    while (seg + 2 < m && w2[seg + 1] < w2r) ++seg;
    const double frac = (w2r - w2[seg]) / (w2[seg + 1] - w2[seg]);
    const double theta_r = theta[seg] + frac * (theta[seg + 1] - theta[seg]);

    // Points on each side ranked by closeness to +/-90 degrees; noisy arcs
    // average the formula over span symmetric pairs.
    std::vector<std::pair<double, std::size_t>> below, above;
    for (std::size_t i = 0; i < m; ++i) {
        const double phi = std::abs(theta[i] - theta_r);
        if (!(phi > 0.0) || phi >= kPi) continue;
        (w2[i] < w2r ? below : above).emplace_back(std::abs(phi - kPi / 2.0), i);
    }
    if (below.empty() || above.empty())
        throw ValidationError("band selection: resonance lacks points on both sides");
    std::sort(below.begin(), below.end());
    std::sort(above.begin(), above.end());
    const std::size_t pairs = std::min({span, below.size(), above.size()});
    double eta = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
        const std::size_t b = below[p].second, a = above[p].second;
        const double phi_b = std::abs(theta[b] - theta_r);
        const double phi_a = std::abs(theta[a] - theta_r);
        eta += (w2[a] - w2[b]) / (w2r * (std::tan(phi_a / 2.0) + std::tan(phi_b / 2.0)));
    }
    eta /= static_cast<double>(pairs);

    ModeEstimate est;
    est.natural_frequency = std::sqrt(w2r);
    est.loss_factor = eta;
    const Complex to_resonance = std::polar(circle.radius, theta_r);
    est.modal_constant = Complex(0.0, 1.0) * eta * w2r * 2.0 * to_resonance;

    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) {
        const double d = std::abs(curve.grid[i] - est.natural_frequency);
        if (d < nearest) {
            nearest = d;
            circle.resonance_index = i;
        }
    }
    est.source_circle = std::move(circle);
    return est;
}

ModeEstimate remove_window_damping(ModeEstimate mode, double window_decay_rate) {
    if (window_decay_rate > 0.0 && mode.natural_frequency > 0.0)
        mode.loss_factor -= 2.0 * window_decay_rate / mode.natural_frequency;
    return mode;
}

SplitReport detect_mode_split(const frf::FrfCurve& curve, Band band) {
    curve.validate();
    const auto idx = band_indices(curve, band);
    if (idx.size() < 9)
        throw ValidationError(fmt::format("band holds {} grid points; at least 9 are needed", idx.size()));
    const std::size_t m = idx.size();
    std::vector<Complex> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = curve.values[idx[i]];
    const std::size_t span = noise_span(pts);
    const double eps = relative_noise(pts);
    std::vector<double> speed(m - span), sigma(m - span);
    for (std::size_t j = 0; j + span < m; ++j) {
        const double dw = curve.grid[idx[j + span]] - curve.grid[idx[j]];
        speed[j] = std::abs(pts[j + span] - pts[j]) / dw;
        sigma[j] = eps * std::sqrt(0.5 * (std::norm(pts[j]) + std::norm(pts[j + span]))) / dw;
    }
    const double top = *std::max_element(speed.begin(), speed.end());

    std::vector<std::size_t> peaks;
    for (std::size_t j = 1; j + 1 < speed.size(); ++j)
        if (speed[j] > speed[j - 1] && speed[j] >= speed[j + 1] && speed[j] >= kPeakFloorRatio * top) peaks.push_back(j);

    for (bool merged = true; merged && peaks.size() > 1;) {
        merged = false;
        for (std::size_t p = 0; p + 1 < peaks.size(); ++p) {
            const std::size_t a = peaks[p], b = peaks[p + 1];
            const double dip = *std::min_element(speed.begin() + static_cast<std::ptrdiff_t>(a),
                                                 speed.begin() + static_cast<std::ptrdiff_t>(b) + 1);
            const std::size_t low = speed[a] < speed[b] ? a : b;
            if (dip >= kSplitDipRatio * speed[low] || speed[low] - dip < kPeakSignificance * sigma[low]) {
                peaks.erase(peaks.begin() + static_cast<std::ptrdiff_t>(speed[a] < speed[b] ? p : p + 1));
                merged = true;
                break;
            }
        }
    }

    if (peaks.empty()) throw ValidationError("band selection: no sweep-rate maximum interior to the band");
    if (peaks.size() > 2)
        throw ValidationError(fmt::format("{} separate circles in band; choose a narrower band", peaks.size()));

    SplitReport report;
    report.circle_count = static_cast<int>(peaks.size());
    if (peaks.size() == 1) {
        report.bands = {band};
        report.modes.push_back(extract_mode(curve, band));
        return report;
    }
    const auto dip = static_cast<std::size_t>(
        std::min_element(speed.begin() + static_cast<std::ptrdiff_t>(peaks[0]),
                         speed.begin() + static_cast<std::ptrdiff_t>(peaks[1]) + 1) - speed.begin());
    const double split = curve.grid[idx[dip + span / 2]];
    report.bands = {{band.lo, split}, {split, band.hi}};
    for (const auto& b : report.bands) report.modes.push_back(extract_mode(curve, b));
    return report;
}

GapReport coarse_grid_gap(const frf::FrfCurve& curve, std::size_t factor, Band band) {
    if (factor < 1) throw ValidationError("decimation factor must be >= 1");
    curve.validate();
    const auto idx = band_indices(curve, band);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < idx.size(); i += factor) kept.push_back(idx[i]);
    if (kept.size() < 5)
        throw ValidationError(fmt::format("decimation by {} leaves {} points in band; at least 5 are needed", factor, kept.size()));

    std::vector<Complex> pts(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) pts[i] = curve.values[kept[i]];
    const auto circle = fit_circle(pts);
    const auto theta = unwrapped_angles(pts, circle.center);

    GapReport report;
    report.factor = factor;
    report.points = kept.size();
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
        const double gap = std::abs(theta[i + 1] - theta[i]) * 180.0 / kPi;
        if (gap > report.max_gap_deg) {
            report.max_gap_deg = gap;
            report.gap_frequency = 0.5 * (curve.grid[kept[i]] + curve.grid[kept[i + 1]]);
        }
    }
    return report;
}

GapReport coarse_grid_gap(const frf::FrfCurve& curve, std::size_t factor) {
    if (curve.grid.empty()) throw ValidationError("curve is empty");
    return coarse_grid_gap(curve, factor, {curve.grid.front(), curve.grid.back()});
}

}  // namespace whirlbench::nyquist
