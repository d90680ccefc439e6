#include "whirlbench/signal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "whirlbench/error.hpp"
#include "whirlbench/fft.hpp"
#include "whirlbench/numeric.hpp"
#include "whirlbench/random.hpp"

namespace whirlbench::signal {

namespace {

using Transfer = std::function<Complex(std::size_t response, Complex s)>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int derivative_order(frf::FrfKind kind) {
    switch (kind) {
        case frf::FrfKind::Receptance: return 0;
        case frf::FrfKind::Mobility: return 1;
        case frf::FrfKind::Accelerance: return 2;
    }
    return 0;
}

std::string response_units(frf::FrfKind kind) {
    switch (kind) {
        case frf::FrfKind::Receptance: return "m";
        case frf::FrfKind::Mobility: return "m/s";
        case frf::FrfKind::Accelerance: return "m/s^2";
    }
    return "m";
}

/// Decay rate (1/s) of the envelope of a mode with pole w_r^2 (1 + i eta).
double envelope_decay(double natural_frequency, double loss_factor) {
    return natural_frequency * std::sqrt(Complex(1.0, loss_factor)).imag();
}

void validate_setup(const ImpactSetup& setup, std::size_t dofs) {
    if (!(setup.sample_rate > 0.0) || !std::isfinite(setup.sample_rate))
        throw ValidationError("sample_rate must be positive");
    if (!fft::is_power_of_two(setup.samples) || setup.samples < 16)
        throw ValidationError("record length must be a power of two >= 16");
    if (!std::isfinite(setup.pulse.width) || setup.pulse.width * setup.sample_rate < 2.0 - 1e-9)
        throw ValidationError("pulse width must span at least 2 samples");
    if (!std::isfinite(setup.pulse.amplitude)) throw ValidationError("pulse amplitude must be finite");
    if (setup.averages < 1) throw ValidationError("averages must be >= 1");
    if (setup.hit_dof >= dofs) throw ValidationError("hit DOF out of range");
    if (setup.response_dofs.empty()) throw ValidationError("at least one response DOF is required");
    for (auto d : setup.response_dofs)
        if (d >= dofs) throw ValidationError("response DOF out of range");
    if (setup.window == WindowPolicy::Explicit &&
        (!(setup.window_decay_rate > 0.0) || !std::isfinite(setup.window_decay_rate)))
        throw ValidationError("explicit exponential window needs a positive decay rate");
}

MeasurementSet simulate(const Transfer& transfer, double slowest_decay, const ImpactSetup& setup, std::size_t dofs) {
    validate_setup(setup, dofs);
    const std::size_t n = setup.samples;
    const double fs = setup.sample_rate;
    const double dt = 1.0 / fs;
    const int order = derivative_order(setup.response_kind);

    // Envelope of the slowest mode at the start of the last 2% of the record.
    const double t_tail = static_cast<double>(n - std::max<std::size_t>(1, n / 50)) * dt;
    const double needed = std::log(1.0 / kDecayThreshold) / t_tail;
    double sigma = setup.window == WindowPolicy::Explicit ? setup.window_decay_rate : 0.0;
    if (slowest_decay + sigma < needed) {
        if (slowest_decay == 0.0 && setup.window != WindowPolicy::Explicit)
            throw NumericError("undamped system never decays within the record; an explicit exponential window is required");
        if (setup.window != WindowPolicy::Auto)
            throw NumericError(fmt::format(
                "response envelope is {:.3g} of peak after {:.6g} s; lengthen the record or apply an exponential window",
                std::exp(-(slowest_decay + sigma) * t_tail), static_cast<double>(n) * dt));
        sigma = needed - slowest_decay;
    }

    std::vector<double> force(n, 0.0);
    const double width = setup.pulse.width;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (t > width * (1.0 + 1e-12)) break;
        // t == width gives sin(pi) ~ 1e-16 rather than 0; snap it.
        const double shape = t >= width ? 0.0 : std::sin(std::numbers::pi * t / width);
        force[i] = setup.pulse.amplitude * shape * std::exp(-sigma * t);
    }
    const auto f_bins = fft::forward_real(force);

    // One period of the periodic response: X_k = H(sigma + i w_k) F_k. Once
    // the causal response has decayed this is the transient record, and the
    // non-causal precursor of hysteretic damping wraps into the record
    // instead of being cut off.
    std::vector<std::vector<double>> responses;
    for (auto dof : setup.response_dofs) {
        std::vector<Complex> x_bins(f_bins.size());
        for (std::size_t k = 0; k < f_bins.size(); ++k) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(k) * fs / static_cast<double>(n);
            const Complex s(sigma, w);
            Complex h = transfer(dof, s);
            for (int p = 0; p < order; ++p) h *= s;
            if (!std::isfinite(h.real()) || !std::isfinite(h.imag()))
                throw NumericError(fmt::format("transfer function is singular at bin {}", k));
            x_bins[k] = h * f_bins[k];
        }
        responses.push_back(fft::inverse_real(x_bins, n));
    }

    MeasurementSet set;
    set.hit_dof = setup.hit_dof;
    set.response_dofs = setup.response_dofs;
    set.response_kind = setup.response_kind;
    set.window_decay_rate = sigma;
    set.analysis_band_hz = {0.1 * fs / 2.0, 0.8 * fs / 2.0};

    Hit hit;
    hit.force = {fs, force, ChannelRole::Force, "N"};
    for (auto& r : responses) hit.responses.push_back({fs, std::move(r), ChannelRole::Response, response_units(setup.response_kind)});
    set.hits.assign(setup.averages, hit);
    return set;
}

}  // namespace

std::string to_string(ChannelRole role) { return role == ChannelRole::Force ? "force" : "response"; }

ChannelRole role_from_string(const std::string& text) {
    if (text == "force") return ChannelRole::Force;
    if (text == "response") return ChannelRole::Response;
    throw ValidationError("unknown channel role '" + text + "'");
}

void TimeRecord::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw ValidationError("sample rate must be positive");
    if (!fft::is_power_of_two(samples.size())) throw ValidationError("sample count must be a power of two");
}

double MeasurementSet::sample_rate() const { return hits.empty() ? 0.0 : hits.front().force.sample_rate; }

std::size_t MeasurementSet::length() const { return hits.empty() ? 0 : hits.front().force.samples.size(); }

void MeasurementSet::validate() const {
    if (hits.empty()) throw ValidationError("measurement set has no averages");
    const double fs = sample_rate();
    const std::size_t n = length();
    for (const auto& hit : hits) {
        hit.force.validate();
        if (hit.force.sample_rate != fs || hit.force.samples.size() != n)
            throw ValidationError("all records must share sample rate and length");
        if (hit.responses.size() != response_dofs.size())
            throw ValidationError("each hit needs one response record per response DOF");
        for (const auto& r : hit.responses) {
            r.validate();
            if (r.sample_rate != fs || r.samples.size() != n)
                throw ValidationError("all records must share sample rate and length");
        }
    }
}

MeasurementSet simulate_impact(const frf::ModalModel& model, const ImpactSetup& setup) {
    model.validate();
    double slowest = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < model.modes(); ++r)
        slowest = std::min(slowest, envelope_decay(model.natural_frequencies[r], model.loss_factors[r]));
    const frf::ModalModel& m = model;
    auto transfer = [&m, &setup](std::size_t response, Complex s) {
        return frf::modal_transfer(m, {response, setup.hit_dof}, s);
    };
    return simulate(transfer, slowest, setup, model.dofs());
}

MeasurementSet simulate_impact(const rotor::RotorSystem& system, const ImpactSetup& setup) {
    system.validate();
    const rotor::RotorSystem& sys = system;
    auto transfer = [&sys, &setup](std::size_t response, Complex s) {
        return frf::rotor_transfer(sys, {response, setup.hit_dof}, s);
    };
    double slowest = 0.0;
    if (!system.undamped()) {
        slowest = std::numeric_limits<double>::infinity();
        for (const auto& mode : rotor::hysteretic_modes(system))
            slowest = std::min(slowest, envelope_decay(mode.frequency, mode.loss_factor));
    }
    return simulate(transfer, slowest, setup, system.dofs());
}

MeasurementSet add_input_noise(const MeasurementSet& set, double noise_to_signal, std::uint64_t seed) {
    if (!std::isfinite(noise_to_signal) || noise_to_signal < 0.0)
        throw ValidationError("noise_to_signal must be >= 0");
    set.validate();
    if (noise_to_signal == 0.0) return set;

    const std::size_t n = set.length();
    const double fs = set.sample_rate();
    auto [lo, hi] = set.analysis_band_hz;
    if (!(hi > lo)) {
        lo = 0.0;
        hi = fs / 2.0;
    }

    std::vector<double> band_power;
    for (const auto& hit : set.hits) {
        const auto bins = fft::forward_real(hit.force.samples);
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const double f = static_cast<double>(k) * fs / static_cast<double>(n);
            if (f >= lo && f <= hi) band_power.push_back(std::norm(bins[k]));
        }
    }
    if (band_power.empty()) throw ValidationError("noise calibration band contains no bins");
    const double mean_gff = pairwise_sum<double>(band_power) / static_cast<double>(band_power.size());
    // E|DFT(noise)_k|^2 = N sigma^2 for white noise of variance sigma^2.
    const double sigma = std::sqrt(noise_to_signal * mean_gff / static_cast<double>(n));

    const CounterRng rng(seed);
    MeasurementSet noisy = set;
    for (std::size_t h = 0; h < noisy.hits.size(); ++h) {
        auto& samples = noisy.hits[h].force.samples;
        for (std::size_t i = 0; i < n; ++i) samples[i] += sigma * rng.normal(h * n + i);
    }
    noisy.noise_to_signal = set.noise_to_signal + noise_to_signal;
    return noisy;
}

Spectra compute_spectra(const MeasurementSet& set, std::size_t channel) {
    set.validate();
    if (channel >= set.response_dofs.size()) throw ValidationError("response channel out of range");
    const std::size_t n = set.length();
    const std::size_t bins = n / 2 + 1;
    const std::size_t avg = set.averages();
    const double fs = set.sample_rate();

    std::vector<std::vector<Complex>> f_spec(avg), x_spec(avg);
    for (std::size_t h = 0; h < avg; ++h) {
        f_spec[h] = fft::forward_real(set.hits[h].force.samples);
        x_spec[h] = fft::forward_real(set.hits[h].responses[channel].samples);
    }

    Spectra s;
    s.frequencies_hz.resize(bins);
    s.g_ff.resize(bins);
    s.g_xx.resize(bins);
    s.g_fx.resize(bins);
    s.incoherent.resize(bins);

    std::vector<double> ff(avg), xx(avg);
    std::vector<Complex> fx(avg);
    std::vector<double> cross_terms;
    cross_terms.reserve(avg * (avg - 1) / 2);
    const double inv_avg = 1.0 / static_cast<double>(avg);
    for (std::size_t k = 0; k < bins; ++k) {
        s.frequencies_hz[k] = static_cast<double>(k) * fs / static_cast<double>(n);
        cross_terms.clear();
        for (std::size_t h = 0; h < avg; ++h) {
            const Complex f = f_spec[h][k];
            const Complex x = x_spec[h][k];
            ff[h] = std::norm(f);
            xx[h] = std::norm(x);
            fx[h] = std::conj(f) * x;
            for (std::size_t g = h + 1; g < avg; ++g)
                cross_terms.push_back(std::norm(f * x_spec[g][k] - f_spec[g][k] * x));
        }
        s.g_ff[k] = pairwise_sum<double>(ff) * inv_avg;
        s.g_xx[k] = pairwise_sum<double>(xx) * inv_avg;
        s.g_fx[k] = pairwise_sum<Complex>(fx) * inv_avg;
        s.incoherent[k] = pairwise_sum<double>(cross_terms) * inv_avg * inv_avg;
    }
    return s;
}

FrfEstimate estimate(const MeasurementSet& set, std::size_t channel) {
    const Spectra s = compute_spectra(set, channel);
    FrfEstimate e;
    e.frequencies_hz = s.frequencies_hz;
    e.kind = set.response_kind;
    e.dofs = {set.response_dofs[channel], set.hit_dof};
    e.window_decay_rate = set.window_decay_rate;
    e.averages = set.averages();
    const std::size_t bins = s.frequencies_hz.size();
    e.h1.resize(bins);
    e.h2.resize(bins);
    e.coherence.resize(bins);
    e.valid.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double cross_power = std::norm(s.g_fx[k]);
        const bool ok = s.g_ff[k] > 0.0 && s.g_xx[k] > 0.0 && cross_power > 0.0 && std::isfinite(s.g_ff[k]) &&
                        std::isfinite(s.g_xx[k]);
        e.valid[k] = ok;
        if (!ok) {
            e.h1[k] = {kNaN, kNaN};
            e.h2[k] = {kNaN, kNaN};
            e.coherence[k] = kNaN;
            continue;
        }
        e.h1[k] = s.g_fx[k] / s.g_ff[k];
        e.h2[k] = s.g_xx[k] / std::conj(s.g_fx[k]);
        e.coherence[k] = cross_power / (cross_power + s.incoherent[k]);
    }
    return e;
}

std::vector<FrfEstimate> estimate(const MeasurementSet& set) {
    std::vector<FrfEstimate> out;
    for (std::size_t c = 0; c < set.response_dofs.size(); ++c) out.push_back(estimate(set, c));
    return out;
}

frf::FrfCurve FrfEstimate::curve(Estimator which, bool as_receptance, std::optional<std::pair<double, double>> band_hz) const {
    frf::FrfCurve c;
    c.kind = as_receptance ? frf::FrfKind::Receptance : kind;
    c.dofs = dofs;
    c.provenance = frf::Provenance::Estimated;
    c.metadata["estimator"] = which == Estimator::H1 ? "H1" : "H2";
    c.metadata["averages"] = std::to_string(averages);
    c.metadata["window_decay_rate"] = fmt::format("{:.9g}", window_decay_rate);
    const int order = derivative_order(kind);
    for (std::size_t k = 0; k < frequencies_hz.size(); ++k) {
        const double f = frequencies_hz[k];
        if (!valid[k] || f <= 0.0) continue;
        if (band_hz && (f < band_hz->first || f > band_hz->second)) continue;
        const double w = 2.0 * std::numbers::pi * f;
        Complex v = which == Estimator::H1 ? h1[k] : h2[k];
        if (as_receptance) {
            const Complex s(window_decay_rate, w);
            for (int p = 0; p < order; ++p) v /= s;
        }
        c.grid.push_back(w);
        c.values.push_back(v);
    }
    if (c.grid.empty()) throw ValidationError("estimate has no valid bins in the requested band");
    return c;
}

double FrfEstimate::band_mean_coherence(double lo_hz, double hi_hz) const {
    std::vector<double> in_band;
    for (std::size_t k = 0; k < frequencies_hz.size(); ++k)
        if (valid[k] && frequencies_hz[k] >= lo_hz && frequencies_hz[k] <= hi_hz) in_band.push_back(coherence[k]);
    if (in_band.empty()) throw ValidationError("no valid coherence bins in band");
    return pairwise_sum<double>(in_band) / static_cast<double>(in_band.size());
}

double FrfEstimate::band_median_coherence(double lo_hz, double hi_hz) const {
    std::vector<double> in_band;
    for (std::size_t k = 0; k < frequencies_hz.size(); ++k)
        if (valid[k] && frequencies_hz[k] >= lo_hz && frequencies_hz[k] <= hi_hz) in_band.push_back(coherence[k]);
    if (in_band.empty()) throw ValidationError("no valid coherence bins in band");
    std::sort(in_band.begin(), in_band.end());
    const std::size_t m = in_band.size();
    return m % 2 == 1 ? in_band[m / 2] : 0.5 * (in_band[m / 2 - 1] + in_band[m / 2]);
}

double snr_from_coherence(double coherence) {
    if (!(coherence >= 0.0 && coherence <= 1.0)) throw ValidationError("coherence must lie in [0, 1]");
    if (coherence == 1.0) return std::numeric_limits<double>::infinity();
    // 1 / (1/g - 1) rounds to the exact ratio for g = 0.8, where g / (1 - g)
    // lands one ulp high.
    return 1.0 / (1.0 / coherence - 1.0);
}

}  // namespace whirlbench::signal
