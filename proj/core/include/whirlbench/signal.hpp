#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "whirlbench/frf.hpp"
#include "whirlbench/rotor.hpp"

namespace whirlbench::signal {

using Complex = std::complex<double>;

enum class ChannelRole { Force, Response };

std::string to_string(ChannelRole role);
ChannelRole role_from_string(const std::string& text);

struct TimeRecord {
    double sample_rate = 0.0;  // Hz
    std::vector<double> samples;
    ChannelRole role = ChannelRole::Force;
    std::string units;

    /// fs > 0 and a power-of-two sample count.
    void validate() const;
};

struct HalfSinePulse {
    double width = 0.0;  // s, at least two sample intervals
    double amplitude = 1.0;
};

enum class WindowPolicy {
    /// Window only when the slowest modal envelope outlasts the record.
    Auto,
    /// Never window; insufficient decay is an error.
    Off,
    /// Always apply ImpactSetup::window_decay_rate.
    Explicit,
};

struct ImpactSetup {
    std::size_t hit_dof = 0;
    std::vector<std::size_t> response_dofs{0};
    double sample_rate = 0.0;  // Hz
    std::size_t samples = 0;   // power of two
    HalfSinePulse pulse;
    std::size_t averages = 1;
    frf::FrfKind response_kind = frf::FrfKind::Accelerance;
    WindowPolicy window = WindowPolicy::Auto;
    double window_decay_rate = 0.0;  // 1/s, used with Explicit
};

/// Envelope ratio the slowest mode must reach before the last 2% of the
/// record for the record to count as decayed.
inline constexpr double kDecayThreshold = 1e-6;

struct Hit {
    TimeRecord force;
    std::vector<TimeRecord> responses;
};

/// Independent impacts at one hit DOF; each average is one hit.
struct MeasurementSet {
    std::vector<Hit> hits;
    std::size_t hit_dof = 0;
    std::vector<std::size_t> response_dofs;
    frf::FrfKind response_kind = frf::FrfKind::Accelerance;
    /// Exponential window exp(-rate t) applied to every channel; 0 when unwindowed.
    double window_decay_rate = 0.0;
    /// Band (Hz) over which injected noise power is matched to the force.
    std::pair<double, double> analysis_band_hz{0.0, 0.0};
    /// Injected G_nn / G_ff, band-averaged; 0 for clean sets.
    double noise_to_signal = 0.0;

    std::size_t averages() const { return hits.size(); }
    double sample_rate() const;
    std::size_t length() const;
    void validate() const;
};

/// Each record is one period of the periodic response, X_k = H(sigma + i w_k) F_k,
/// which equals the transient once the modal envelopes have decayed. Every
/// average repeats the same clean hit; add_input_noise makes them differ.
MeasurementSet simulate_impact(const frf::ModalModel& model, const ImpactSetup& setup);
MeasurementSet simulate_impact(const rotor::RotorSystem& system, const ImpactSetup& setup);

/// Adds white Gaussian noise to every force record. The noise variance makes
/// G_nn equal noise_to_signal times the band-averaged clean G_ff. Draw n of
/// hit h uses counter h * length + n of the seeded stream.
MeasurementSet add_input_noise(const MeasurementSet& set, double noise_to_signal, std::uint64_t seed);

/// Averaged one-sided auto/cross spectra for one response channel, bins 0..N/2.
struct Spectra {
    std::vector<double> frequencies_hz;
    std::vector<double> g_ff;
    std::vector<double> g_xx;
    std::vector<Complex> g_fx;  // mean of conj(F) X
    /// mean over hit pairs of |F_a X_b - F_b X_a|^2, equal to G_ff G_xx - |G_fx|^2.
    std::vector<double> incoherent;
};

Spectra compute_spectra(const MeasurementSet& set, std::size_t channel);

enum class Estimator { H1, H2 };

struct FrfEstimate {
    std::vector<double> frequencies_hz;
    std::vector<Complex> h1;
    std::vector<Complex> h2;
    std::vector<double> coherence;
    std::vector<bool> valid;
    frf::FrfKind kind = frf::FrfKind::Accelerance;
    frf::DofPair dofs;
    double window_decay_rate = 0.0;
    std::size_t averages = 0;

    /// Valid bins inside [lo_hz, hi_hz] excluding 0 Hz, as an FRF curve on a
    /// rad/s grid. With as_receptance the response kind is divided out using
    /// s = window_decay_rate + i w.
    frf::FrfCurve curve(Estimator which, bool as_receptance, std::optional<std::pair<double, double>> band_hz = {}) const;

    double band_mean_coherence(double lo_hz, double hi_hz) const;
    double band_median_coherence(double lo_hz, double hi_hz) const;
};

/// H1 = G_fx / G_ff, H2 = G_xx / G_xf, coherence = |G_fx|^2 / (|G_fx|^2 + incoherent).
/// Bins with a zero auto-spectrum are flagged invalid and carry NaN.
FrfEstimate estimate(const MeasurementSet& set, std::size_t channel);
std::vector<FrfEstimate> estimate(const MeasurementSet& set);

/// Input signal-to-noise ratio G_ff / G_nn = gamma^2 / (1 - gamma^2).
/// Returns +infinity for gamma^2 = 1; throws outside [0, 1].
double snr_from_coherence(double coherence);

}  // namespace whirlbench::signal
