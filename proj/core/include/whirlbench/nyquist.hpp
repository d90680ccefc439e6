#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "whirlbench/frf.hpp"

namespace whirlbench::nyquist {

using Complex = std::complex<double>;

/// Closed band [lo, hi] in rad/s.
struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

struct NyquistPoint {
    Complex value;
    double omega = 0.0;
};

/// Real vs imaginary with frequency implicit, in grid order. An optional band
/// restricts the slice; an empty slice yields an empty list.
std::vector<NyquistPoint> nyquist_points(const frf::FrfCurve& curve);
std::vector<NyquistPoint> nyquist_points(const frf::FrfCurve& curve, Band band);

struct NyquistCircle {
    Complex center;
    double radius = 0.0;
    double rms_residual = 0.0;
    /// Grid indices of the points the circle was fitted to.
    std::vector<std::size_t> arc_points;
    std::size_t resonance_index = 0;
    /// False when geometric refinement failed and the algebraic fit was kept.
    bool converged = true;
    int iterations = 0;
};

/// Algebraic (Kasa) fit followed by damped Gauss-Newton on sum (dist - r)^2.
/// Needs >= 5 non-collinear points.
NyquistCircle fit_circle(std::span<const Complex> points);

inline constexpr int kMaxRefineIterations = 50;

/// Chord noise must stay below this fraction of the longest chord.
inline constexpr double kChordNoiseRatio = 0.15;

/// Grid steps over which sweep rates are measured. 1 for clean curves; for
/// estimated curves the relative noise is read off second differences and the
/// span grows until chord noise drops below kChordNoiseRatio of the longest
/// chord (capped at an eighth of the points).
std::size_t noise_span(std::span<const Complex> points);

struct ModeEstimate {
    double natural_frequency = 0.0;  // rad/s
    double loss_factor = 0.0;
    Complex modal_constant;
    NyquistCircle source_circle;
};

/// Circle-fit extraction on one resonance. The natural frequency sits at the
/// peak of the angular sweep rate d(theta)/d(w^2), located by a quadratic fit of
/// its reciprocal over the half-peak run; the loss factor comes from
/// the points nearest +/-90 degrees from resonance:
///   eta = (w_a^2 - w_b^2) / (w_r^2 (tan(theta_a / 2) + tan(theta_b / 2))).
/// Rates use chords of noise_span points, and eta is averaged over that many
/// symmetric pairs. The curve must be a receptance.
ModeEstimate extract_mode(const frf::FrfCurve& curve, Band band);

/// Loss factor net of an exponential window exp(-rate t): the window adds
/// 2 rate / w_r to every mode.
ModeEstimate remove_window_damping(ModeEstimate mode, double window_decay_rate);

struct SplitReport {
    int circle_count = 0;
    std::vector<ModeEstimate> modes;
    /// Band boundaries used for each circle.
    std::vector<Band> bands;
};

/// Fraction of the smaller peak the separating minimum must fall below for two
/// sweep-rate maxima to count as separate circles.
inline constexpr double kSplitDipRatio = 0.6;
/// Maxima below this fraction of the band's largest sweep rate are ignored.
inline constexpr double kPeakFloorRatio = 0.1;

/// On noisy curves a maximum must also clear the separating minimum by this
/// many standard deviations of the local sweep-rate noise.
inline constexpr double kPeakSignificance = 5.0;

/// Relative noise level eps of a sampled curve (noise rms = eps |H|), read
/// off the median of second differences. 0 for exact data.
double relative_noise(std::span<const Complex> points);

/// Counts separate circles by the interior maxima of the Nyquist-plane sweep
/// rate |d alpha / d w|. Two circles split the band at the minimum between
/// the peaks and fit each half.
SplitReport detect_mode_split(const frf::FrfCurve& curve, Band band);

struct GapReport {
    std::size_t factor = 1;
    std::size_t points = 0;
    double max_gap_deg = 0.0;
    /// rad/s, midpoint of the widest step.
    double gap_frequency = 0.0;
};

/// Keeps every factor-th grid point in the band, fits a circle and reports the
/// widest angular step between consecutive points.
GapReport coarse_grid_gap(const frf::FrfCurve& curve, std::size_t factor, Band band);
GapReport coarse_grid_gap(const frf::FrfCurve& curve, std::size_t factor);

}  // namespace whirlbench::nyquist
