// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "commands.hpp"
#include "whirlbench/error.hpp"
#include "whirlbench/frf.hpp"
#include "whirlbench/io/geometry.hpp"
#include "whirlbench/io/uff58.hpp"
#include "whirlbench/nyquist.hpp"
#include "whirlbench/random.hpp"
#include "whirlbench/rotor.hpp"
#include "whirlbench/signal.hpp"
#include "whirlbench/units.hpp"

using namespace whirlbench;
using frf::Complex;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome circle_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = frf::linear_grid(0.0, 300.0, 801);
    const double k = 1.0e4, m = 1.0, h = 250.0, c = 3.0;
    const auto rec = frf::sdof_receptance_structural({k, m, h}, grid);
    const auto mob = frf::to_mobility(frf::sdof_receptance_viscous({k, m, c}, grid));
    double worst_s = 0.0, worst_v = 0.0;
    for (const auto& v : rec.values)
        worst_s = std::max(worst_s, std::abs(std::abs(v - Complex(0.0, -1.0 / (2 * h))) * 2 * h - 1.0));
    for (const auto& v : mob.values)
        worst_v = std::max(worst_v, std::abs(std::abs(v - Complex(1.0 / (2 * c), 0.0)) * 2 * c - 1.0));
    const double t = seconds_since(t0);
    return {worst_s < 1e-12 && worst_v < 1e-12 && t < 1.0,
            fmt::format("structural {:.2e}, viscous {:.2e}, {:.3f} s", worst_s, worst_v, t)};
}

Outcome start_point() {
    const double k = 3.7e3, h = 91.0;
    const auto rec = frf::sdof_receptance_structural({k, 2.5, h}, frf::linear_grid(0.0, 100.0, 11));
    const Complex expected(k / (k * k + h * h), -h / (k * k + h * h));
    const Complex mob = frf::to_mobility(rec).values[0];
    const Complex acc = frf::to_accelerance(rec).values[0];
    const bool ok = rec.values[0] == expected && mob == Complex(0.0, 0.0) && acc == Complex(0.0, 0.0);
    return {ok, fmt::format("alpha(0) = ({:.17g}, {:.17g})", rec.values[0].real(), rec.values[0].imag())};
}

Outcome coherence() {
    frf::SdofStructural p{std::pow(kTwoPi * 40.0, 2), 1.0, 0.0};
    p.structural_damping = 0.05 * p.stiffness;
    const auto model = frf::ModalModel::from_sdof(p);
    signal::ImpactSetup s;
    s.sample_rate = 256.0;
    s.samples = 4096;
    s.pulse = {2.0 / 256.0, 1.0};

    s.averages = 4;
    const auto clean = signal::estimate(signal::simulate_impact(model, s), 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < clean.coherence.size(); ++i)
        if (clean.valid[i]) worst = std::max(worst, std::abs(clean.coherence[i] - 1.0));

    s.averages = 256;
    const auto noisy = signal::add_input_noise(signal::simulate_impact(model, s), 1.0, cli::kDefaultSeed);
    const auto [lo, hi] = noisy.analysis_band_hz;
    const double mean = signal::estimate(noisy, 0).band_mean_coherence(lo, hi);
    const double snr = signal::snr_from_coherence(0.8);
    return {worst < 1e-10 && std::abs(mean - 0.5) <= 0.03 && snr == 4.0,
            fmt::format("clean |1 - g2| {:.2e}, noisy band mean {:.4f}, snr(0.8) = {}", worst, mean, snr)};
}

Outcome whirl_oracle() {
    const double k = 1.0e4, g = 5.0;
    double worst = 0.0, worst_re = 0.0, degenerate = 0.0;
    for (double spin : {0.0, 10.0, 25.0, 50.0, 100.0}) {
        const auto system = rotor::isotropic_point_rotor(1.0, k, g, spin);
        const auto lambda = rotor::companion_eigenvalues(system);
        std::vector<double> freqs;
        for (Eigen::Index i = 0; i < lambda.size(); ++i) {
            worst_re = std::max(worst_re, std::abs(lambda[i].real()) / std::abs(lambda[i]));
            if (lambda[i].imag() > 0.0) freqs.push_back(lambda[i].imag());
        }
        std::sort(freqs.begin(), freqs.end());
        const double half = 0.5 * g * spin;
        const double root = std::sqrt(half * half + k);
        if (freqs.size() != 2) return {false, fmt::format("{} positive roots at {} rad/s", freqs.size(), spin)};
        worst = std::max({worst, std::abs(freqs[0] - (root - half)) / (root - half),
                          std::abs(freqs[1] - (root + half)) / (root + half)});
        if (spin == 0.0) degenerate = std::abs(freqs[1] - freqs[0]) / freqs[0];
    }
    return {worst < 1e-10 && worst_re < 1e-9 && degenerate < 1e-10,
            fmt::format("max rel error {:.2e}, |Re| {:.2e}, standstill gap {:.2e}", worst, worst_re, degenerate)};
}

Outcome modal_roundtrip() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_steps = 0.0, worst_eta = 0.0;
    for (double k : {1.0e3, 1.0e4, 1.0e5})
        for (double m : {0.5, 1.0, 2.0})
            for (double eta : {0.01, 0.03, 0.1}) {
                const double wn = std::sqrt(k / m);
                const auto curve = frf::sdof_receptance_structural({k, m, eta * k}, frf::linear_grid(0.0, 2.0 * wn, 801));
                const double step = curve.grid[1] - curve.grid[0];
                const auto est = nyquist::extract_mode(curve, {0.5 * wn, 1.5 * wn});
                worst_steps = std::max(worst_steps, std::abs(est.natural_frequency - wn) / step);
                worst_eta = std::max(worst_eta, std::abs(est.loss_factor - eta) / eta);
            }

    frf::ModalModel model;
    model.natural_frequencies = {100.0, 300.0};
    model.loss_factors = {0.02, 0.05};
    model.mode_shapes = Eigen::MatrixXcd::Ones(1, 2);
    const auto curve = frf::mdof_receptance(model, 0, 0, frf::linear_grid(0.0, 450.0, 1801));
    const double split = std::sqrt(100.0 * 300.0);
    const auto a = nyquist::extract_mode(curve, {50.0, split});
    const auto b = nyquist::extract_mode(curve, {split, 450.0});
    const double two_mode = std::max(std::abs(a.loss_factor - 0.02) / 0.02, std::abs(b.loss_factor - 0.05) / 0.05);
    const double t = seconds_since(t0);
    return {worst_steps < 1.0 && worst_eta < 0.02 && two_mode < 0.05 && t < 10.0,
            fmt::format("lattice {:.3g} grid steps, eta {:.2e}; two-mode eta {:.2e}; {:.3f} s", worst_steps, worst_eta,
                        two_mode, t)};
}

Outcome bifurcation() {
    cli::CommonOptions common;
    common.out = std::filesystem::temp_directory_path() / "whirlbench-acceptance-sweep";
    const auto result = cli::cmd_nyquist_sweep(common, {});
    const auto& entries = result.entries;
    if (entries.empty()) return {false, "no sweep entries"};

    bool ok = entries.front().speed_rpm == 0.0 && entries.front().circle_count == 1 &&
              entries.back().circle_count == 2;
    std::string counts;
    double worst = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        counts += fmt::format("{}{}:{}", i ? " " : "", e.speed_rpm, e.circle_count);
        if (i > 0 && entries[i - 1].circle_count == 2 && e.circle_count == 1) ok = false;
        if (e.circle_count != 2) continue;
        const auto system = rotor::build_default_rotor({{"spin_speed_rpm", e.speed_rpm}});
        const auto modes = rotor::whirl_eigen(system);
        std::vector<double> used;
        for (double f : e.frequencies_hz) {
            double best = 1e300, best_f = 0.0;
            for (const auto& mode : modes) {
                const double fm = rad_per_s_to_hz(mode.frequency);
                if (std::find(used.begin(), used.end(), fm) != used.end()) continue;
                if (std::abs(f - fm) / fm < best) {
                    best = std::abs(f - fm) / fm;
                    best_f = fm;
                }
            }
            used.push_back(best_f);
            worst = std::max(worst, best);
        }
    }
    ok = ok && worst < 0.02;
    return {ok, fmt::format("counts [{}], worst split frequency error {:.2e}", counts, worst)};
}

Outcome fft_equivalence() {
    frf::SdofStructural p{std::pow(kTwoPi * 40.0, 2), 1.0, 0.0};
    p.structural_damping = 0.05 * p.stiffness;
    const auto model = frf::ModalModel::from_sdof(p);
    signal::ImpactSetup s;
    s.sample_rate = 256.0;
    s.samples = 4096;
    s.pulse = {2.0 / 256.0, 1.0};
    const double nyq = 0.5 * s.sample_rate;
    const auto est = signal::estimate(signal::simulate_impact(model, s), 0);
    const auto curve = est.curve(signal::Estimator::H1, true, std::pair{0.1 * nyq, 0.8 * nyq});
    const auto direct = frf::mdof_receptance(model, 0, 0, curve.grid);
    double worst_mag = 0.0, worst_phase = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Complex r = curve.values[i] / direct.values[i];
        worst_mag = std::max(worst_mag, std::abs(std::abs(r) - 1.0));
        worst_phase = std::max(worst_phase, std::abs(std::arg(r)) * 180.0 / std::numbers::pi);
    }
    return {worst_mag < 0.01 && worst_phase < 2.0 && curve.size() > 0,
            fmt::format("{} bins, magnitude {:.2e}, phase {:.2e} deg", curve.size(), worst_mag, worst_phase)};
}

Outcome format_roundtrips() {
    const auto system = rotor::build_default_rotor({{"spin_speed_rpm", 3000.0}});
    const auto curve = frf::rotor_receptance(system, {2, 3}, frf::linear_grid(0.0, kTwoPi * 500.0, 2001));
    const auto text = io::write_uff58(curve, io::uff_header_for(curve, system.dof_labels));
    const auto back = io::read_uff58(text).at(0).curve;
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i)
        worst = std::max(worst, std::abs(back.values[i] - curve.values[i]) / std::abs(curve.values[i]));

    const auto geometry = io::default_rotor_geometry();
    const bool geometry_ok = io::read_geometry(io::write_geometry(geometry)) == geometry;

    const CounterRng rng(cli::kDefaultSeed);
    int crashes = 0, structured = 0;
    const std::string alphabet = " -+.0123456789EeD\n58b";
    std::string small = io::write_uff58(
        frf::FrfCurve{{0.0, 1.0, 2.0, 3.0}, {1.0, Complex(0.0, 1.0), -1.0, 2.0}}, io::Uff58Header{});
    for (std::uint64_t n = 0; n < 10000; ++n) {
        std::string mutated = small;
        const int edits = 1 + static_cast<int>(rng.bits(n * 32) % 4);
        for (int e = 0; e < edits && !mutated.empty(); ++e) {
            const std::uint64_t c = n * 32 + 1 + 3 * static_cast<std::uint64_t>(e);
            const std::size_t pos = rng.bits(c) % mutated.size();
            switch (rng.bits(c + 1) % 4) {
                case 0: mutated[pos] = alphabet[rng.bits(c + 2) % alphabet.size()]; break;
                case 1: mutated.erase(pos, 1 + rng.bits(c + 2) % 16); break;
                case 2: mutated.insert(pos, 1, alphabet[rng.bits(c + 2) % alphabet.size()]); break;
                default: mutated.resize(pos); break;
            }
        }
        try {
            io::read_uff58(mutated);
        } catch (const Error&) {
            ++structured;
        } catch (...) {
            ++crashes;
        }
    }
    return {worst <= 1e-7 && geometry_ok && crashes == 0,
            fmt::format("UFF max rel {:.2e}, geometry {}, fuzz {} structured errors / {} other", worst,
                        geometry_ok ? "exact" : "mismatch", structured, crashes)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"SDOF circle exactness", circle_exactness},
        {"start point", start_point},
        {"coherence identities", coherence},
        {"whirl oracle", whirl_oracle},
        {"modal round-trip", modal_roundtrip},
        {"bifurcation scenario", bifurcation},
        {"FFT-synthesis equivalence", fft_equivalence},
        {"format round-trips", format_roundtrips},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
