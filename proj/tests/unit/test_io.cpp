#include <doctest.h>

#include <cmath>
#include <regex>
#include <string>

#include <nlohmann/json.hpp>

#include "whirlbench/error.hpp"
#include "whirlbench/frf.hpp"
#include "whirlbench/io/csv.hpp"
#include "whirlbench/io/format.hpp"
#include "whirlbench/io/geometry.hpp"
#include "whirlbench/io/rotor_config.hpp"
#include "whirlbench/io/svg.hpp"
#include "whirlbench/io/uff58.hpp"
#include "whirlbench/random.hpp"
#include "whirlbench/units.hpp"

using namespace whirlbench;
using namespace whirlbench::io;
using frf::Complex;

namespace {

const std::vector<rotor::DofLabel> kLabels{
    {2, rotor::Lateral::Y}, {2, rotor::Lateral::Z}, {2, rotor::Lateral::TiltY}, {2, rotor::Lateral::TiltZ}};

frf::FrfCurve golden_curve() {
    frf::FrfCurve c;
    c.grid = {0.0, kTwoPi * 0.5, kTwoPi * 1.0};
    c.values = {Complex(1.0, -0.5), Complex(0.25, 2.0), Complex(-1.5e-3, 0.0)};
    c.dofs = {2, 2};
    c.provenance = frf::Provenance::Synthesized;
    return c;
}

const char* const kGolden =
    "    -1\n"
    "    58\n"
    "golden                                                                          \n"
    "dofs=2,2 provenance=synthesized                                                 \n"
    "NONE                                                                            \n"
    "NONE                                                                            \n"
    "NONE                                                                            \n"
    "    4         1    0         0 NONE               2   6 NONE               2   6\n"
    "         6         3         1 0.000000000E+00 5.000000000E-01 0.000000000E+00\n"
    "        18    0    0    0 Frequency            Hz                  \n"
    "         8    0    0    0 receptance           NONE                \n"
    "        13    0    0    0 Force                N                   \n"
    "         0    0    0    0 NONE                 NONE                \n"
    "  1.000000000000E+00 -5.000000000000E-01  2.500000000000E-01  2.000000000000E+00\n"
    " -1.500000000000E-03  0.000000000000E+00\n"
    "    -1\n";

frf::FrfCurve rotor_curve() {
    const auto system = rotor::build_default_rotor({{"spin_speed_rpm", 3000.0}});
    return frf::rotor_receptance(system, {2, 3}, frf::linear_grid(0.0, kTwoPi * 500.0, 2001));
}

}  // namespace

TEST_CASE("numbers print with nine significant digits") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(12345678912.0) == "1.23456789e+10");
}

TEST_CASE("UFF-58 writer matches the golden record") {
    const auto c = golden_curve();
    auto h = uff_header_for(c, kLabels);
    h.description = "golden";
    CHECK(write_uff58(c, h) == kGolden);
}

TEST_CASE("UFF-58 golden record reads back") {
    const auto records = read_uff58(kGolden);
    REQUIRE(records.size() == 1);
    const auto& r = records[0];
    CHECK(r.header.description == "golden");
    CHECK(r.header.response_direction == 6);
    CHECK(r.header.response_node == 2);
    CHECK(r.curve.kind == frf::FrfKind::Receptance);
    CHECK(r.curve.dofs.response == 2);
    CHECK(r.curve.provenance == frf::Provenance::Synthesized);
    REQUIRE(r.curve.size() == 3);
    const auto c = golden_curve();
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.curve.grid[i] == doctest::Approx(c.grid[i]).epsilon(1e-12));
        CHECK(r.curve.values[i] == c.values[i]);
    }
}

TEST_CASE("UFF-58 round-trip keeps values to 1e-7") {
    const auto c = rotor_curve();
    for (bool dp : {true, false}) {
        auto h = uff_header_for(c, kLabels);
        h.double_precision = dp;
        const auto back = read_uff58(write_uff58(c, h)).at(0).curve;
        REQUIRE(back.size() == c.size());
        const double tol = dp ? 1e-7 : 1e-5;
        for (std::size_t i = 0; i < c.size(); ++i) {
            CHECK(std::abs(back.values[i] - c.values[i]) <= tol * std::abs(c.values[i]));
            CHECK(std::abs(back.grid[i] - c.grid[i]) <= 1e-9 * c.grid.back());
        }
    }
    // Rewriting a record read back from text reproduces the text.
    const auto text = write_uff58(c, uff_header_for(c, kLabels));
    const auto rec = read_uff58(text).at(0);
    CHECK(write_uff58(rec.curve, rec.header) == text);
    CHECK(uff_direction_code(rotor::Lateral::TiltZ) == -5);
    CHECK(uff_direction_code(rotor::Lateral::Z) == 3);
}

TEST_CASE("several records and D exponents are accepted") {
    std::string two = std::string(kGolden) + kGolden;
    CHECK(read_uff58(two).size() == 2);
    std::string d = kGolden;
    d.replace(d.find("2.500000000000E-01"), 18, "2.500000000000D-01");
    CHECK(read_uff58(d).at(0).curve.values[1].real() == 0.25);
}

TEST_CASE("malformed UFF-58 raises parse errors with line numbers") {
    std::string truncated = kGolden;
    truncated.resize(truncated.find(" -1.5"));
    CHECK_THROWS_AS(read_uff58(truncated), ParseError);
    std::string bad_count = kGolden;
    bad_count.replace(bad_count.find("         3         1"), 20, "         0         1");
    CHECK_THROWS_AS(read_uff58(bad_count), ParseError);
    std::string binary = kGolden;
    binary.replace(binary.find("    58"), 6, "   58b");
    CHECK_THROWS_AS(read_uff58(binary), ParseError);
    try {
        std::string text = kGolden;
        text.replace(text.find("2.000000000000E+00"), 18, "2.00000000000XE+00");
        read_uff58(text);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 14);
    }
    CHECK_THROWS_AS(write_uff58(frf::FrfCurve{{1.0, 2.0, 4.0}, {1.0, 1.0, 1.0}}, {}), ValidationError);
}

TEST_CASE("fuzzed UFF-58 input never escapes as anything but a library error") {
    const std::string base = kGolden;
    const CounterRng rng(2024);
    const std::string alphabet = " -+.0123456789EeDd\n58b";
    int parsed = 0, rejected = 0;
    for (std::uint64_t n = 0; n < 10000; ++n) {
        std::string text = base;
        const std::uint64_t c0 = n * 64;
        const int edits = 1 + static_cast<int>(rng.bits(c0) % 4);
        for (int e = 0; e < edits; ++e) {
            const std::uint64_t c = c0 + 1 + 4 * static_cast<std::uint64_t>(e);
            if (text.empty()) break;
            const std::size_t pos = rng.bits(c) % text.size();
            switch (rng.bits(c + 1) % 4) {
                case 0: text[pos] = alphabet[rng.bits(c + 2) % alphabet.size()]; break;
                case 1: text.erase(pos, 1 + rng.bits(c + 2) % 20); break;
                case 2: text.insert(pos, 1, alphabet[rng.bits(c + 2) % alphabet.size()]); break;
                default: text.resize(pos); break;
            }
        }
        try {
            read_uff58(text);
            ++parsed;
        } catch (const Error&) {
            ++rejected;
        } catch (...) {
            FAIL("unstructured exception for fuzz case " << n);
        }
    }
    CHECK(parsed + rejected == 10000);
    CHECK(rejected > 1000);
}

TEST_CASE("CSV and sidecar round-trip") {
    auto c = rotor_curve();
    c.metadata["label"] = "3000 rpm";
    const auto back = read_frf_csv(write_frf_csv(c), write_frf_sidecar(c));
    REQUIRE(back.size() == c.size());
    CHECK(back.dofs == c.dofs);
    CHECK(back.kind == c.kind);
    CHECK(back.metadata.at("label") == "3000 rpm");
    for (std::size_t i = 0; i < c.size(); i += 97) {
        CHECK(std::abs(back.values[i] - c.values[i]) <= 1e-8 * std::abs(c.values[i]));
        CHECK(back.grid[i] == doctest::Approx(c.grid[i]).epsilon(1e-8));
    }
    const auto bare = read_frf_csv("freq_hz,real,imag\n1,2,3\n2,4,5\n");
    CHECK(bare.provenance == frf::Provenance::Measured);
    CHECK(bare.values[1] == Complex(4.0, 5.0));
    CHECK_THROWS_AS(read_frf_csv("freq_hz,real,imag\n2,1,1\n1,1,1\n"), ParseError);
    CHECK_THROWS_AS(read_frf_csv("freq_hz,real,imag\n1,x,1\n"), ParseError);
}

TEST_CASE("time records round-trip as float32 and CSV") {
    signal::TimeRecord r{512.0, {}, signal::ChannelRole::Response, "m/s^2"};
    for (int i = 0; i < 64; ++i) r.samples.push_back(std::sin(0.3 * i) * 1e-3);
    const auto raw = read_time_record_raw(write_time_record_raw(r), write_time_record_sidecar(r));
    CHECK(raw.sample_rate == 512.0);
    CHECK(raw.role == signal::ChannelRole::Response);
    CHECK(raw.units == "m/s^2");
    for (std::size_t i = 0; i < 64; ++i) CHECK(raw.samples[i] == static_cast<double>(static_cast<float>(r.samples[i])));
    const auto csv = read_time_record_csv(write_time_record_csv(r), signal::ChannelRole::Response);
    CHECK(csv.sample_rate == doctest::Approx(512.0).epsilon(1e-9));
    CHECK(csv.samples[5] == doctest::Approx(r.samples[5]).epsilon(1e-8));
    CHECK_THROWS_AS(read_time_record_raw("abc", write_time_record_sidecar(r)), ParseError);
}

TEST_CASE("campbell and mode tables have the documented columns") {
    const auto system = rotor::build_default_rotor();
    const std::vector<double> speeds{0.0, 100.0};
    const auto csv = write_campbell_csv(rotor::campbell(system, speeds));
    CHECK(csv.rfind("speed_rpm,branch_id,direction,freq_hz\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 4);

    nyquist::ModeEstimate m;
    m.natural_frequency = kTwoPi * 10.0;
    m.loss_factor = 0.02;
    m.modal_constant = Complex(0.0, 2.0);
    const std::vector<nyquist::ModeEstimate> modes{m};
    const auto table = write_modes_csv(modes);
    CHECK(table.rfind("freq_hz,loss_factor,modal_constant_mag,modal_constant_phase_deg,", 0) == 0);
    const auto j = nlohmann::json::parse(write_modes_json(modes));
    CHECK(j.at(0).at("freq_hz").get<double>() == doctest::Approx(10.0));
}

TEST_CASE("geometry JSON round-trips exactly") {
    auto g = default_rotor_geometry();
    g.validate();
    CHECK(read_geometry(write_geometry(g)) == g);
    for (const auto& n : g.nodes) {
        CHECK(n.x >= 0.0);
        CHECK(n.x <= 0.610);
    }

    const CounterRng rng(3);
    GeometryModel random;
    for (int i = 0; i < 50; ++i)
        random.nodes.push_back({i + 1, rng.normal(3 * i) * 1e-3, rng.normal(3 * i + 1) * 1e7, rng.uniform(3 * i + 2) / 3.0});
    random.trace_lines = {{1, 2, 3}, {10, 20, 30, 10}};
    random.dof_map = {{5, rotor::Lateral::TiltZ, 0}};
    CHECK(read_geometry(write_geometry(random)) == random);

    CHECK_THROWS_AS(read_geometry(R"({"nodes": [{"id": 1, "x": 0, "y": 0, "z": 0}, {"id": 1, "x": 1, "y": 0, "z": 0}]})"),
                    ValidationError);
    CHECK_THROWS_AS(read_geometry(R"({"nodes": [{"id": 1, "x": 0, "y": 0, "z": 0}], "traces": [[1, 2]]})"),
                    ValidationError);
    CHECK_THROWS_AS(read_geometry("{"), ParseError);
}

TEST_CASE("rotor configs parse and round-trip") {
    const auto a = read_rotor_config(R"({"parameters": {"disk_mass": 1.2}, "spin_speed_rpm": 3000})");
    const auto ref = rotor::build_default_rotor({{"disk_mass", 1.2}, {"spin_speed_rpm", 3000.0}});
    CHECK(a.mass.isApprox(ref.mass));
    CHECK(a.spin_speed == doctest::Approx(ref.spin_speed));
    const auto b = read_rotor_config(write_rotor_config(a));
    CHECK(b.mass == a.mass);
    CHECK(b.stiffness == a.stiffness);
    CHECK(b.gyroscopic == a.gyroscopic);
    CHECK(b.spin_speed == a.spin_speed);
    CHECK(b.loss_factor == a.loss_factor);
    CHECK(b.dof_labels == a.dof_labels);

    const auto m = read_rotor_config(R"({"matrices": {"mass": [[1, 0], [0, 1]], "stiffness": [[4, 0], [0, 4]]}})");
    CHECK(m.dofs() == 2);
    CHECK(m.whirl_pairs().size() == 1);
    CHECK_THROWS_AS(read_rotor_config(R"({"parameters": {}, "bogus": 1})"), ValidationError);
    CHECK_THROWS_AS(read_rotor_config(R"({"parameters": {}, "matrices": {}})"), ValidationError);
    CHECK_THROWS_AS(read_rotor_config(R"({"parameters": {"disk_mass": "heavy"}})"), ValidationError);
    CHECK_THROWS_AS(read_rotor_config("[1,"), ParseError);
}

TEST_CASE("SVG output is deterministic and keeps equal aspect") {
    const auto c = rotor_curve();
    const std::vector<frf::FrfCurve> curves{c};
    const auto spec = nyquist_plot(curves, "Nyquist");
    CHECK(emit_svg(spec) == emit_svg(nyquist_plot(curves, "Nyquist")));
    CHECK(emit_svg(bode_plot(c, "Bode")).find("<svg") == 0);
    CHECK(!emit_svg(real_imag_plot(c, "Re/Im")).empty());

    PlotSpec square;
    square.title = "aspect";
    Series s;
    s.markers = true;
    s.x = {1.0, 0.0, -1.0, 0.0};
    s.y = {0.0, 10.0, 0.0, -10.0};
    for (auto& v : s.x) v = 5.0 + 10.0 * v;
    square.panels.push_back({"re", "im", {s}, true});
    const auto svg = emit_svg(square);
    const std::regex marker(R"re(<circle cx="([-0-9.]+)" cy="([-0-9.]+)")re");
    std::vector<std::pair<double, double>> px;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), marker); it != std::sregex_iterator(); ++it)
        px.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
    REQUIRE(px.size() == 4);
    const double width = px[0].first - px[2].first;
    const double height = px[3].second - px[1].second;
    CHECK(std::abs(width / height - 1.0) < 1e-6);

    Series bad;
    bad.x = {0.0, 1.0};
    bad.y = {0.0, NAN};
    PlotSpec broken;
    broken.panels.push_back({"x", "y", {bad}, false});
    try {
        emit_svg(broken);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("0/0/1") != std::string::npos);
    }
    CHECK_THROWS_AS(emit_svg(PlotSpec{}), ValidationError);
}
