#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <vector>

#include "whirlbench/fft.hpp"
#include "whirlbench/frf.hpp"
#include "whirlbench/nyquist.hpp"
#include "whirlbench/random.hpp"
#include "whirlbench/rotor.hpp"
#include "whirlbench/signal.hpp"
#include "whirlbench/units.hpp"

using namespace whirlbench;
using Complex = std::complex<double>;

static void BM_WhirlEigen(benchmark::State& state) {
    auto system = rotor::build_default_rotor();
    system.spin_speed = rpm_to_rad_per_s(6000.0);
    for (auto _ : state) benchmark::DoNotOptimize(rotor::whirl_eigen(system));
}
BENCHMARK(BM_WhirlEigen);

static void BM_Campbell(benchmark::State& state) {
    const auto system = rotor::build_default_rotor();
    std::vector<double> speeds;
    for (int i = 0; i <= 60; ++i) speeds.push_back(rpm_to_rad_per_s(100.0 * i));
    for (auto _ : state) benchmark::DoNotOptimize(rotor::campbell(system, speeds));
}
BENCHMARK(BM_Campbell);

static void BM_RotorReceptance(benchmark::State& state) {
    auto system = rotor::build_default_rotor();
    system.spin_speed = rpm_to_rad_per_s(3000.0);
    const auto grid = frf::linear_grid(0.0, 2.0 * kTwoPi * 400.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(frf::rotor_receptance(system, {2, 2}, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RotorReceptance)->Arg(801)->Arg(8001);

static void BM_FitCircle(benchmark::State& state) {
    const CounterRng rng(3);
    std::vector<Complex> pts;
    for (int i = 0; i < state.range(0); ++i)
        pts.push_back(std::polar(2.0, 0.01 * i) + 0.01 * Complex(rng.normal(2 * i), rng.normal(2 * i + 1)));
    for (auto _ : state) benchmark::DoNotOptimize(nyquist::fit_circle(pts));
}
BENCHMARK(BM_FitCircle)->Arg(16)->Arg(256);

static void BM_DetectModeSplit(benchmark::State& state) {
    frf::ModalModel model;
    model.natural_frequencies = {100.0, 115.0};
    model.loss_factors = {0.01, 0.01};
    model.mode_shapes = Eigen::MatrixXcd::Ones(1, 2);
    const auto curve = frf::mdof_receptance(model, 0, 0, frf::linear_grid(50.0, 170.0, 1201));
    for (auto _ : state) benchmark::DoNotOptimize(nyquist::detect_mode_split(curve, {60.0, 160.0}));
}
BENCHMARK(BM_DetectModeSplit);

static void BM_FftReal(benchmark::State& state) {
    const CounterRng rng(9);
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.normal(i);
    for (auto _ : state) benchmark::DoNotOptimize(fft::forward_real(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FftReal)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

static void BM_EstimateFrf(benchmark::State& state) {
    signal::ImpactSetup setup;
    setup.sample_rate = 256.0;
    setup.samples = 4096;
    setup.pulse.width = 2.0 / setup.sample_rate;
    setup.averages = static_cast<std::size_t>(state.range(0));
    const frf::ModalModel model = frf::ModalModel::from_sdof({std::pow(kTwoPi * 40.0, 2), 1.0, 0.0});
    setup.window = signal::WindowPolicy::Explicit;
    setup.window_decay_rate = 2.0;
    const auto set = signal::add_input_noise(signal::simulate_impact(model, setup), 0.1, 1729);
    for (auto _ : state) benchmark::DoNotOptimize(signal::estimate(set, 0));
}
BENCHMARK(BM_EstimateFrf)->Arg(4)->Arg(64);
BENCHMARK_MAIN();
