#include <doctest.h>

#include <cmath>
#include <numbers>

#include "whirlbench/error.hpp"
#include "whirlbench/rotor.hpp"
#include "whirlbench/units.hpp"

using namespace whirlbench;
using namespace whirlbench::rotor;

namespace {

// Positive whirl roots of q'' + g W J q' + k q = 0 with J = [[0, 1], [-1, 0]].
double forward_root(double g, double spin, double k) {
    const double h = 0.5 * g * spin;
    return h + std::sqrt(h * h + k);
}

double backward_root(double g, double spin, double k) {
    const double h = 0.5 * g * spin;
    return -h + std::sqrt(h * h + k);
}

}  // namespace

TEST_CASE("isotropic point rotor matches the quadratic whirl roots") {
    const double k = 4.0e4, g = 3.0;
    for (double spin : {0.0, 10.0, 25.0, 50.0, 100.0}) {
        const auto modes = whirl_eigen(isotropic_point_rotor(1.0, k, g, spin));
        REQUIRE(modes.size() == 2);
        const double bw = backward_root(g, spin, k);
        const double fw = forward_root(g, spin, k);
        CHECK(std::abs(modes[0].frequency - bw) / bw < 1e-10);
        CHECK(std::abs(modes[1].frequency - fw) / fw < 1e-10);
        for (const auto& mode : modes) CHECK(std::abs(mode.eigenvalue.real()) <= 1e-9 * std::abs(mode.eigenvalue));
        if (spin > 0.0) {
            CHECK(modes[0].direction == WhirlDirection::Backward);
            CHECK(modes[1].direction == WhirlDirection::Forward);
        }
    }
}

TEST_CASE("standstill pair is degenerate and still split into circular whirls") {
    const auto modes = whirl_eigen(isotropic_point_rotor(2.0, 800.0, 1.0, 0.0));
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].frequency == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(modes[1].frequency == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(modes[0].direction != modes[1].direction);
}

TEST_CASE("companion eigenvalues come in conjugate pairs") {
    const auto lambda = companion_eigenvalues(isotropic_point_rotor(1.0, 100.0, 2.0, 5.0));
    REQUIRE(lambda.size() == 4);
    double sum_imag = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) sum_imag += lambda[i].imag();
    CHECK(std::abs(sum_imag) < 1e-9);
}

TEST_CASE("classify_whirl follows the orbit sense") {
    Eigen::VectorXcd v(2);
    v << 1.0, std::complex<double>(0.0, -1.0);
    CHECK(classify_whirl(v, {0, 1}) == WhirlDirection::Forward);
    v << 1.0, std::complex<double>(0.0, 1.0);
    CHECK(classify_whirl(v, {0, 1}) == WhirlDirection::Backward);
    v << 1.0, 0.5;
    CHECK(classify_whirl(v, {0, 1}) == WhirlDirection::Planar);
}

TEST_CASE("midspan station stiffness matches beam formulas") {
    RotorParameters p;
    const double ei = p.shaft_modulus * std::numbers::pi * std::pow(p.shaft_diameter, 4) / 64.0;
    const double l = p.shaft_length;
    const auto ks = p.station_stiffness();
    CHECK(ks(0, 0) == doctest::Approx(48.0 * ei / (l * l * l)).epsilon(1e-12));
    CHECK(ks(1, 1) == doctest::Approx(12.0 * ei / l).epsilon(1e-12));
    CHECK(std::abs(ks(0, 1)) < 1e-9 * ks(1, 1));
}

TEST_CASE("default rotor tilt pair follows the disk gyroscopic formula") {
    const RotorParameters p;
    const double id = p.diametral_inertia();
    const double kt = p.station_stiffness()(1, 1) / id;
    const double g = p.disk_polar_inertia / id;
    for (double rpm : {0.0, 1000.0, 6000.0}) {
        const auto spin = rpm_to_rad_per_s(rpm);
        const auto modes = whirl_eigen(build_default_rotor({{"spin_speed_rpm", rpm}}));
        REQUIRE(modes.size() == 4);
        CHECK(modes[2].frequency == doctest::Approx(backward_root(g, spin, kt)).epsilon(1e-10));
        CHECK(modes[3].frequency == doctest::Approx(forward_root(g, spin, kt)).epsilon(1e-10));
        if (rpm > 0.0) CHECK(modes[3].direction == WhirlDirection::Forward);
    }
}

TEST_CASE("campbell diagram tracks diverging branches") {
    const auto system = build_default_rotor();
    const std::vector<double> speeds{0.0, rpm_to_rad_per_s(3000.0), rpm_to_rad_per_s(6000.0)};
    const auto diagram = campbell(system, speeds);
    REQUIRE(diagram.branches.size() == 4);
    const CampbellBranch* fw = nullptr;
    const CampbellBranch* bw = nullptr;
    for (const auto& b : diagram.branches) {
        REQUIRE(b.frequencies.size() == speeds.size());
        if (b.frequencies[0] > 1000.0 && b.direction == WhirlDirection::Forward) fw = &b;
        if (b.frequencies[0] > 1000.0 && b.direction == WhirlDirection::Backward) bw = &b;
    }
    REQUIRE(fw != nullptr);
    REQUIRE(bw != nullptr);
    CHECK(fw->frequencies[0] == doctest::Approx(bw->frequencies[0]).epsilon(1e-9));
    CHECK(fw->frequencies[1] > fw->frequencies[0]);
    CHECK(fw->frequencies[2] > fw->frequencies[1]);
    CHECK(bw->frequencies[2] < bw->frequencies[1]);
    // Distinct frequencies leave no tie for the eigenvector fallback to break.
    CHECK(diagram.diagnostics.empty());
}

TEST_CASE("hysteretic modes of an isotropic rotor carry the loss factor") {
    auto system = isotropic_point_rotor(1.0, 1.0e4, 0.0);
    system.loss_factor = 0.02;
    const auto modes = hysteretic_modes(system);
    REQUIRE(modes.size() == 2);
    for (const auto& m : modes) {
        CHECK(m.frequency == doctest::Approx(100.0).epsilon(1e-9));
        CHECK(m.loss_factor == doctest::Approx(0.02).epsilon(1e-9));
    }
}

TEST_CASE("invalid systems are rejected") {
    auto system = isotropic_point_rotor(1.0, 1.0, 0.5);
    system.gyroscopic(1, 0) = 0.5;
    CHECK_THROWS_AS(system.validate(), ValidationError);
    system = isotropic_point_rotor(1.0, 1.0, 0.5);
    system.mass(0, 0) = -1.0;
    CHECK_THROWS_AS(system.validate(), ValidationError);
    CHECK_THROWS_AS(build_default_rotor({{"disk_mass", -1.0}}), ValidationError);
    CHECK_THROWS_AS(build_default_rotor({{"no_such_key", 1.0}}), ValidationError);
    CHECK_THROWS_AS(build_default_rotor({{"disk_position", 1.0}}), ValidationError);
}

TEST_CASE("lateral names round-trip") {
    for (auto d : {Lateral::Y, Lateral::Z, Lateral::TiltY, Lateral::TiltZ})
        CHECK(lateral_from_string(to_string(d)) == d);
    CHECK_THROWS_AS(lateral_from_string("x"), ValidationError);
}
