#include <doctest.h>

#include <cmath>
#include <numbers>

#include "whirlbench/error.hpp"
#include "whirlbench/frf.hpp"
#include "whirlbench/nyquist.hpp"
#include "whirlbench/random.hpp"
#include "whirlbench/rotor.hpp"
#include "whirlbench/units.hpp"

using namespace whirlbench;
using namespace whirlbench::nyquist;

namespace {

double geometric_cost(std::span<const Complex> pts, Complex c) {
    double mean = 0.0;
    for (const auto& p : pts) mean += std::abs(p - c);
    mean /= static_cast<double>(pts.size());
    double cost = 0.0;
    for (const auto& p : pts) cost += std::pow(std::abs(p - c) - mean, 2);
    return cost;
}

// Refining grid search over the centre; the radius is the mean distance,
// which is optimal for a fixed centre.
Complex grid_search_center(std::span<const Complex> pts, Complex guess, double half_width) {
    Complex best = guess;
    for (int level = 0; level < 40; ++level) {
        const Complex origin = best;
        double best_cost = geometric_cost(pts, best);
        for (int i = -10; i <= 10; ++i)
            for (int j = -10; j <= 10; ++j) {
                const Complex c = origin + Complex(i, j) * (half_width / 10.0);
                const double cost = geometric_cost(pts, c);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = c;
                }
            }
        half_width *= 0.3;
    }
    return best;
}

frf::FrfCurve sdof_curve(double k, double m, double eta, std::size_t points) {
    const double wn = std::sqrt(k / m);
    return frf::sdof_receptance_structural({k, m, eta * k}, frf::linear_grid(0.0, 2.0 * wn, points));
}

}  // namespace

TEST_CASE("points on an exact circle give that circle") {
    const Complex center(0.3, -2.0);
    const double r = 1.7;
    std::vector<Complex> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(center + std::polar(r, 0.2 + 0.25 * i));
    const auto c = fit_circle(pts);
    CHECK(std::abs(c.center - center) < 1e-12);
    CHECK(c.radius == doctest::Approx(r).epsilon(1e-12));
    CHECK(c.rms_residual < 1e-12);
    CHECK(c.converged);
}

TEST_CASE("geometric refinement reaches the grid-search minimum") {
    const CounterRng rng(5);
    const Complex center(-4.0, 1.0);
    const double r = 3.0;
    std::vector<Complex> pts;
    for (int i = 0; i < 20; ++i) {
        // A short arc with noise: the algebraic fit alone is biased here.
        const double a = 0.1 * i;
        pts.push_back(center + std::polar(r, a) + 0.05 * Complex(rng.normal(2 * i), rng.normal(2 * i + 1)));
    }
    const auto fit = fit_circle(pts);
    const auto oracle = grid_search_center(pts, fit.center, 1.0);
    CHECK(std::abs(fit.center - oracle) < 1e-6);
    CHECK(geometric_cost(pts, fit.center) <= geometric_cost(pts, oracle) * (1.0 + 1e-9));
}

TEST_CASE("degenerate point sets are rejected") {
    std::vector<Complex> line;
    for (int i = 0; i < 8; ++i) line.emplace_back(i, 2.0 * i);
    CHECK_THROWS_AS(fit_circle(line), ValidationError);
    std::vector<Complex> few(4, Complex(1.0, 1.0));
    CHECK_THROWS_AS(fit_circle(few), ValidationError);
    std::vector<Complex> same(8, Complex(1.0, 1.0));
    CHECK_THROWS_AS(fit_circle(same), ValidationError);
    std::vector<Complex> bad{1.0, Complex(0.0, 1.0), -1.0, Complex(0.0, -1.0), Complex(NAN, 0.0)};
    CHECK_THROWS_AS(fit_circle(bad), ValidationError);
}

TEST_CASE("SDOF lattice round-trips through extract_mode") {
    for (double k : {1.0e3, 1.0e4, 1.0e5})
        for (double m : {0.5, 1.0, 2.0})
            for (double eta : {0.01, 0.03, 0.1}) {
                const auto curve = sdof_curve(k, m, eta, 801);
                const double wn = std::sqrt(k / m);
                const double step = curve.grid[1] - curve.grid[0];
                const auto est = extract_mode(curve, {0.5 * wn, 1.5 * wn});
                CAPTURE(k);
                CAPTURE(m);
                CAPTURE(eta);
                CHECK(std::abs(est.natural_frequency - wn) < step);
                CHECK(std::abs(est.loss_factor - eta) / eta < 0.02);
                // Modal constant of 1 / (k - w^2 m + i h) is 1 / m.
                CHECK(std::abs(est.modal_constant - Complex(1.0 / m, 0.0)) < 0.05 / m);
            }
}

TEST_CASE("well separated modes are extracted independently") {
    frf::ModalModel model;
    model.natural_frequencies = {100.0, 320.0};
    model.loss_factors = {0.02, 0.04};
    model.mode_shapes = Eigen::MatrixXcd::Ones(1, 2);
    const auto curve = frf::mdof_receptance(model, 0, 0, frf::linear_grid(0.0, 450.0, 1801));
    const double split = std::sqrt(100.0 * 320.0);
    const auto a = extract_mode(curve, {60.0, split});
    const auto b = extract_mode(curve, {split, 450.0});
    CHECK(std::abs(a.loss_factor - 0.02) / 0.02 < 0.05);
    CHECK(std::abs(b.loss_factor - 0.04) / 0.04 < 0.05);
    CHECK(a.natural_frequency == doctest::Approx(100.0).epsilon(0.0025));
    CHECK(b.natural_frequency == doctest::Approx(320.0).epsilon(0.0025));

    // Split detection ignores circles far smaller than the dominant one; give
    // the upper mode a circle of comparable diameter.
    model.mode_shapes(0, 1) = std::sqrt(320.0 * 320.0 * 0.04 / (100.0 * 100.0 * 0.02));
    const auto comparable = frf::mdof_receptance(model, 0, 0, frf::linear_grid(0.0, 450.0, 1801));
    CHECK(detect_mode_split(curve, {60.0, 450.0}).circle_count == 1);
    CHECK(detect_mode_split(comparable, {60.0, 450.0}).circle_count == 2);
}

TEST_CASE("split detection counts one or two circles") {
    frf::ModalModel model;
    model.natural_frequencies = {100.0, 115.0};
    model.loss_factors = {0.01, 0.01};
    model.mode_shapes = Eigen::MatrixXcd::Ones(1, 2);
    const auto grid = frf::linear_grid(50.0, 170.0, 1201);
    const auto two = detect_mode_split(frf::mdof_receptance(model, 0, 0, grid), {60.0, 160.0});
    REQUIRE(two.circle_count == 2);
    CHECK(two.modes[0].natural_frequency == doctest::Approx(100.0).epsilon(0.002));
    CHECK(two.modes[1].natural_frequency == doctest::Approx(115.0).epsilon(0.002));
    CHECK(two.bands[0].hi == two.bands[1].lo);

    const auto one = detect_mode_split(sdof_curve(1.0e4, 1.0, 0.02, 801), {50.0, 150.0});
    CHECK(one.circle_count == 1);
    CHECK(one.modes[0].loss_factor == doctest::Approx(0.02).epsilon(0.02));
}

TEST_CASE("exact curves carry no noise and use single-step chords") {
    const auto curve = sdof_curve(1.0e4, 1.0, 0.02, 801);
    CHECK(relative_noise(curve.values) < 1e-3);
    CHECK(noise_span(std::span<const Complex>(curve.values).subspan(300, 200)) == 1);
}

TEST_CASE("noise estimate tracks injected relative noise") {
    const auto curve = sdof_curve(1.0e4, 1.0, 0.02, 4001);
    const CounterRng rng(8);
    auto noisy = curve.values;
    const double eps = 0.02;
    for (std::size_t i = 0; i < noisy.size(); ++i)
        noisy[i] += eps * std::abs(noisy[i]) * Complex(rng.normal(2 * i), rng.normal(2 * i + 1)) / std::sqrt(2.0);
    const auto slice = std::span<const Complex>(noisy).subspan(1800, 400);
    CHECK(relative_noise(slice) == doctest::Approx(eps).epsilon(0.3));
    CHECK(noise_span(slice) > 1);
}

TEST_CASE("window damping is removed from the loss factor") {
    ModeEstimate m;
    m.natural_frequency = 200.0;
    m.loss_factor = 0.05;
    const auto out = remove_window_damping(m, 3.0);
    CHECK(out.loss_factor == doctest::Approx(0.05 - 2.0 * 3.0 / 200.0));
}

TEST_CASE("extraction preconditions") {
    auto curve = sdof_curve(1.0e4, 1.0, 0.02, 801);
    CHECK_THROWS_AS(extract_mode(curve, {99.0, 100.5}), ValidationError);
    CHECK_THROWS_AS(extract_mode(frf::to_mobility(curve), {50.0, 150.0}), ValidationError);
    // A band on one flank holds no rate maximum.
    CHECK_THROWS_AS(extract_mode(curve, {110.0, 190.0}), ValidationError);
}

TEST_CASE("coarse grids leave wide angular gaps") {
    const auto curve = sdof_curve(1.0e4, 1.0, 0.01, 1601);
    const auto fine = coarse_grid_gap(curve, 1, {90.0, 110.0});
    const auto coarse = coarse_grid_gap(curve, 8, {90.0, 110.0});
    CHECK(coarse.max_gap_deg > fine.max_gap_deg);
    CHECK(coarse.gap_frequency == doctest::Approx(100.0).epsilon(0.02));
    CHECK(coarse.points < fine.points);
    CHECK_THROWS_AS(coarse_grid_gap(curve, 0), ValidationError);
}

TEST_CASE("nyquist points follow the grid order inside a band") {
    const auto curve = sdof_curve(1.0e4, 1.0, 0.02, 201);
    const auto all = nyquist_points(curve);
    CHECK(all.size() == curve.size());
    const auto band = nyquist_points(curve, {50.0, 60.0});
    REQUIRE_FALSE(band.empty());
    for (const auto& p : band) {
        CHECK(p.omega >= 50.0);
        CHECK(p.omega <= 60.0);
    }
    CHECK(nyquist_points(curve, {1000.0, 2000.0}).empty());
}

TEST_CASE("circle fit moves with rotated and shifted points") {
    const CounterRng rng(12);
    std::vector<Complex> pts;
    for (int i = 0; i < 30; ++i)
        pts.push_back(Complex(1.0, -2.0) + std::polar(0.8, 0.05 * i) + 0.01 * Complex(rng.normal(2 * i), rng.normal(2 * i + 1)));
    const auto base = fit_circle(pts);
    const Complex turn = std::polar(1.0, 0.7), shift(-3.0, 5.0);
    std::vector<Complex> moved;
    for (const auto& p : pts) moved.push_back(p * turn + shift);
    const auto out = fit_circle(moved);
    CHECK(std::abs(out.center - (base.center * turn + shift)) < 1e-10);
    CHECK(std::abs(out.radius - base.radius) < 1e-10);
    CHECK(std::abs(out.rms_residual - base.rms_residual) < 1e-10);
}

TEST_CASE("exact arcs down to 60 degrees fit to rounding") {
    for (double arc : {kTwoPi, std::numbers::pi, std::numbers::pi / 3.0}) {
        std::vector<Complex> pts;
        for (int i = 0; i < 9; ++i) pts.push_back(Complex(3.0, 4.0) + std::polar(5.0, arc * i / 9.0));
        const auto c = fit_circle(pts);
        CAPTURE(arc);
        CHECK(c.rms_residual < 1e-10 * 5.0);
        CHECK(std::abs(c.center - Complex(3.0, 4.0)) < 1e-9);
        CHECK(c.radius == doctest::Approx(5.0).epsilon(1e-10));
    }
}

TEST_CASE("SDOF k 1000, h 100 fits its closed-form circle and round-trips") {
    const auto curve = sdof_curve(1000.0, 1.0, 0.1, 801);
    const auto c = fit_circle(curve.values);
    CHECK(c.radius == doctest::Approx(5.0e-3).epsilon(1e-6));
    CHECK(std::abs(c.center - Complex(0.0, -5.0e-3)) < 5.0e-9);
    const double wn = std::sqrt(1000.0);
    const auto est = extract_mode(curve, {0.5 * wn, 1.5 * wn});
    CHECK(std::abs(est.natural_frequency - wn) < curve.grid[1] - curve.grid[0]);
    CHECK(est.loss_factor == doctest::Approx(0.1).epsilon(0.02));
}

TEST_CASE("structurally damped response lags by 90 degrees at resonance") {
    for (double eta : {0.01, 0.05}) {
        const auto curve = sdof_curve(1.0e4, 1.0, eta, 801);
        const auto est = extract_mode(curve, {50.0, 150.0});
        const auto at = frf::sdof_receptance_structural({1.0e4, 1.0, eta * 1.0e4}, std::vector<double>{est.natural_frequency});
        CHECK(std::abs(std::arg(at.values[0]) + std::numbers::pi / 2.0) < 0.05);
    }
}

TEST_CASE("more than two circles in one band is an error") {
    frf::ModalModel model;
    model.natural_frequencies = {100.0, 115.0, 132.0};
    model.loss_factors = {0.01, 0.01, 0.01};
    model.mode_shapes = Eigen::MatrixXcd::Ones(1, 3);
    const auto curve = frf::mdof_receptance(model, 0, 0, frf::linear_grid(50.0, 200.0, 1501));
    CHECK_THROWS_AS(detect_mode_split(curve, {60.0, 160.0}), ValidationError);
}

TEST_CASE("default rotor circle count never drops as speed rises") {
    const std::vector<double> speeds{0, 30, 1000, 2000, 3000, 4000, 6000};
    int previous = 1;
    for (double rpm : speeds) {
        const auto system = rotor::build_default_rotor({{"spin_speed_rpm", rpm}});
        const auto modes = rotor::whirl_eigen(system);
        // Tilt pair: backward then forward whirl.
        const Band band{0.6 * modes[2].frequency, 1.3 * modes[3].frequency};
        const auto grid = frf::linear_grid(band.lo, band.hi, 801);
        const auto report = detect_mode_split(frf::rotor_receptance(system, {2, 2}, grid), band);
        CAPTURE(rpm);
        CHECK(report.circle_count >= previous);
        previous = report.circle_count;
    }
    CHECK(previous == 2);
}
