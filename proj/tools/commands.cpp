#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "whirlbench/error.hpp"
#include "whirlbench/io/csv.hpp"
#include "whirlbench/io/format.hpp"
#include "whirlbench/io/rotor_config.hpp"
#include "whirlbench/io/svg.hpp"
#include "whirlbench/io/uff58.hpp"
#include "whirlbench/units.hpp"

namespace whirlbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json number(double v) { return json::parse(io::format_number(v)); }

json numbers(const std::vector<double>& values) {
    json out = json::array();
    for (double v : values) out.push_back(number(v));
    return out;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text, const char* what) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ValidationError(fmt::format("{}: '{}' is not a number", what, text));
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

void emit(const fs::path& dir, const std::string& name, std::string_view content, std::vector<fs::path>& files) {
    const auto path = dir / name;
    io::write_text_file(path, content);
    files.push_back(path);
}

std::string speed_tag(double rpm) { return io::format_number(rpm) + "rpm"; }

std::string pick_format(const CommonOptions& common, const std::string& fallback, std::initializer_list<const char*> allowed,
                        const char* command) {
    const std::string f = common.format.value_or(fallback);
    for (const char* a : allowed)
        if (f == a) return f;
    throw ValidationError(fmt::format("{} does not support --format {}", command, f));
}

rotor::RotorSystem at_speed(rotor::RotorSystem system, std::optional<double> rpm) {
    if (rpm) {
        if (!std::isfinite(*rpm) || *rpm < 0.0) throw ValidationError("spin speed must be a finite value >= 0");
        system.spin_speed = rpm_to_rad_per_s(*rpm);
    }
    return system;
}

void require_input(const fs::path& path, const char* what) {
    std::error_code ec;
    if (!fs::exists(path, ec)) throw ValidationError(fmt::format("{} not found: {}", what, path.string()));
    if (fs::is_directory(path, ec)) throw ValidationError(fmt::format("{} is a directory: {}", what, path.string()));
}

std::vector<double> checked_speeds(const std::vector<double>& rpm) {
    if (rpm.empty()) throw ValidationError("empty speed list");
    for (std::size_t i = 0; i < rpm.size(); ++i) {
        if (!std::isfinite(rpm[i]) || rpm[i] < 0.0) throw ValidationError(fmt::format("speed {} must be finite and >= 0", rpm[i]));
        if (i > 0 && !(rpm[i] > rpm[i - 1])) throw ValidationError("speeds must be strictly increasing");
    }
    std::vector<double> rad(rpm.size());
    std::transform(rpm.begin(), rpm.end(), rad.begin(), rpm_to_rad_per_s);
    return rad;
}

std::string dof_name(const rotor::RotorSystem& system, std::size_t dof) {
    const auto& l = system.dof_labels.at(dof);
    return fmt::format("{}:{}", l.node, rotor::to_string(l.direction));
}

std::string lower_extension(const fs::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::string curve_json(const frf::FrfCurve& curve, const std::vector<double>* coherence = nullptr) {
    json doc = json::parse(io::write_frf_sidecar(curve));
    std::vector<double> f(curve.size()), re(curve.size()), im(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        f[i] = rad_per_s_to_hz(curve.grid[i]);
        re[i] = curve.values[i].real();
        im[i] = curve.values[i].imag();
    }
    doc["freq_hz"] = numbers(f);
    doc["real"] = numbers(re);
    doc["imag"] = numbers(im);
    if (coherence) doc["coherence"] = numbers(*coherence);
    return dump(doc);
}

/// Writes the curve in the chosen format under the given stem.
void write_curve(const fs::path& dir, const std::string& stem, const frf::FrfCurve& curve, const std::string& format,
                 const std::vector<rotor::DofLabel>& labels, std::vector<fs::path>& files) {
    if (format == "csv") {
        emit(dir, stem + ".csv", io::write_frf_csv(curve), files);
        emit(dir, stem + ".json", io::write_frf_sidecar(curve), files);
    } else if (format == "uff") {
        emit(dir, stem + ".uff", io::write_uff58(curve, io::uff_header_for(curve, labels)), files);
    } else {
        emit(dir, stem + ".json", curve_json(curve), files);
    }
}

}  // namespace

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("WHIRLBENCH_SEED"); env && *env) {
        const std::string_view text = trim(env);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
            throw ValidationError(fmt::format("WHIRLBENCH_SEED '{}' is not an unsigned integer", env));
        return v;
    }
    return kDefaultSeed;
}

std::vector<double> parse_speed_list(const std::string& text) {
    const auto body = trim(text);
    if (body.empty()) throw ValidationError("empty speed list");
    std::vector<double> out;
    if (body.find(':') != std::string_view::npos) {
        const auto parts = split(body, ':');
        if (parts.size() != 3) throw ValidationError("speed range must be start:stop:step");
        const double start = parse_number(parts[0], "speed range");
        const double stop = parse_number(parts[1], "speed range");
        const double step = parse_number(parts[2], "speed range");
        if (!(step > 0.0) || stop < start) throw ValidationError("speed range needs step > 0 and stop >= start");
        const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
        if (count > 100000.0) throw ValidationError("speed range has too many points");
        for (int i = 0; i < static_cast<int>(count); ++i) out.push_back(start + i * step);
    } else {
        for (auto part : split(body, ',')) out.push_back(parse_number(part, "speed list"));
    }
    checked_speeds(out);
    return out;
}

std::pair<double, double> parse_band(const std::string& text) {
    const auto parts = split(trim(text), ',');
    if (parts.size() != 2) throw ValidationError("band must be lo,hi in Hz");
    const double lo = parse_number(parts[0], "band");
    const double hi = parse_number(parts[1], "band");
    if (lo < 0.0 || !(hi > lo)) throw ValidationError("band needs 0 <= lo < hi");
    return {lo, hi};
}

rotor::RotorSystem load_rotor(const CommonOptions& common) {
    if (!common.config) return rotor::build_default_rotor();
    require_input(*common.config, "rotor config");
    return io::read_rotor_config(io::read_text_file(*common.config));
}

std::size_t resolve_dof(const rotor::RotorSystem& system, const std::string& text) {
    if (!text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        std::size_t idx = 0;
        std::from_chars(text.data(), text.data() + text.size(), idx);
        if (idx >= system.dofs()) throw ValidationError(fmt::format("DOF index {} out of range ({} DOFs)", idx, system.dofs()));
        return idx;
    }
    const auto dir = rotor::lateral_from_string(text);
    for (std::size_t i = 0; i < system.dof_labels.size(); ++i)
        if (system.dof_labels[i].direction == dir) return i;
    throw ValidationError(fmt::format("rotor has no '{}' DOF", text));
}

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
    if (!fs::is_directory(dir, ec)) throw IoError(fmt::format("output path {} is not a directory", dir.string()));
    const auto probe = dir / ".whirlbench-write-probe";
    {
        std::ofstream out(probe, std::ios::trunc);
        if (!out || !(out << "ok") || !out.flush()) throw IoError(fmt::format("output directory {} is not writable", dir.string()));
    }
    fs::remove(probe, ec);
}

CampbellResult cmd_campbell(const CommonOptions& common, const CampbellOptions& options) {
    std::vector<double> rpm = options.speeds_rpm.value_or(std::vector<double>{});
    if (!options.speeds_rpm)
        for (int s = 0; s <= 6000; s += 500) rpm.push_back(s);
    const auto speeds = checked_speeds(rpm);
    const auto format = pick_format(common, "csv", {"csv", "json"}, "campbell");
    const auto system = load_rotor(common);
    prepare_output_dir(common.out);

    CampbellResult result;
    result.diagram = rotor::campbell(system, speeds);
    if (format == "csv") {
        emit(common.out, "campbell.csv", io::write_campbell_csv(result.diagram), result.files);
    } else {
        json doc;
        doc["speed_rpm"] = numbers(rpm);
        doc["branches"] = json::array();
        for (const auto& b : result.diagram.branches) {
            std::vector<double> hz(b.frequencies.size());
            std::transform(b.frequencies.begin(), b.frequencies.end(), hz.begin(), rad_per_s_to_hz);
            doc["branches"].push_back({{"branch_id", b.id}, {"direction", rotor::to_string(b.direction)}, {"freq_hz", numbers(hz)}});
        }
        doc["diagnostics"] = result.diagram.diagnostics;
        emit(common.out, "campbell.json", dump(doc), result.files);
    }
    emit(common.out, "campbell.svg", io::emit_svg(io::campbell_plot(result.diagram, "Campbell diagram")), result.files);
    return result;
}

SweepResult cmd_nyquist_sweep(const CommonOptions& common, const SweepOptions& options) {
    const auto rpm = options.speeds_rpm.value_or(kDefaultSweepRpm);
    const auto speeds = checked_speeds(rpm);
    pick_format(common, "json", {"json"}, "nyquist-sweep");
    if (common.grid < 16) throw ValidationError("--grid must be at least 16");
    if (options.averages < 1) throw ValidationError("averages must be >= 1");
    const bool measured = options.measured || options.noise_to_signal > 0.0;
    const auto seed = resolve_seed(common.seed);
    const auto system = load_rotor(common);
    prepare_output_dir(common.out);

    // The whirl pair that splits the most, judged at the top speed.
    const double probe = speeds.back() > 0.0 ? speeds.back() : rpm_to_rad_per_s(1000.0);
    const std::vector<double> probe_speeds{0.0, probe};
    const auto diagram = rotor::campbell(system, probe_speeds);
    double best_split = 0.0, bw = 0.0, fw = 0.0;
    const auto& br = diagram.branches;
    for (std::size_t a = 0; a < br.size(); ++a)
        for (std::size_t b = a + 1; b < br.size(); ++b) {
            const double f0a = br[a].frequencies[0], f0b = br[b].frequencies[0];
            if (std::abs(f0a - f0b) > 1e-6 * std::max(f0a, f0b)) continue;
            const double split = std::abs(br[a].frequencies[1] - br[b].frequencies[1]);
            if (split > best_split) {
                best_split = split;
                bw = std::min(br[a].frequencies[1], br[b].frequencies[1]);
                fw = std::max(br[a].frequencies[1], br[b].frequencies[1]);
            }
        }
    if (!(best_split > 0.0)) throw ValidationError("rotor has no gyroscopically split whirl pair");

    auto probe_system = system;
    probe_system.spin_speed = probe;
    const auto modes = rotor::whirl_eigen(probe_system);
    const auto fw_mode = std::min_element(modes.begin(), modes.end(), [fw](const auto& x, const auto& y) {
        return std::abs(x.frequency - fw) < std::abs(y.frequency - fw);
    });
    // First DOF within rounding of the largest amplitude.
    const Eigen::VectorXd amp = fw_mode->eigenvector.cwiseAbs();
    Eigen::Index dof_index = 0;
    while (amp(dof_index) < amp.maxCoeff() * (1.0 - 1e-9)) ++dof_index;

    SweepResult result;
    result.dof = static_cast<std::size_t>(dof_index);
    result.band = {0.6 * bw, 1.3 * fw};
    const auto grid = frf::linear_grid(result.band.lo, result.band.hi, common.grid);
    const std::pair<double, double> band_hz{rad_per_s_to_hz(result.band.lo), rad_per_s_to_hz(result.band.hi)};

    struct Work {
        SweepEntry entry;
        std::string svg;
    };
    auto run = [&](std::size_t i) {
        auto sys = system;
        sys.spin_speed = speeds[i];
        frf::FrfCurve curve;
        double window = 0.0;
        if (!measured) {
            curve = frf::rotor_receptance(sys, {result.dof, result.dof}, grid);
        } else {
            signal::ImpactSetup setup;
            setup.hit_dof = result.dof;
            setup.response_dofs = {result.dof};
            setup.sample_rate = std::ceil(band_hz.second / 0.4);
            setup.samples = 8192;
            setup.pulse = {2.0 / setup.sample_rate, 1.0};
            setup.averages = options.averages;
            const auto set = signal::add_input_noise(signal::simulate_impact(sys, setup), options.noise_to_signal, seed);
            const auto est = signal::estimate(set, 0);
            curve = est.curve(signal::Estimator::H2, true, band_hz);
            window = est.window_decay_rate;
        }
        const auto split = nyquist::detect_mode_split(curve, result.band);
        Work w;
        w.entry.speed_rpm = rpm[i];
        w.entry.circle_count = split.circle_count;
        for (const auto& m : split.modes) {
            const auto net = nyquist::remove_window_damping(m, window);
            w.entry.frequencies_hz.push_back(rad_per_s_to_hz(net.natural_frequency));
            w.entry.loss_factors.push_back(net.loss_factor);
        }
        const std::vector<frf::FrfCurve> curves{curve};
        w.svg = io::emit_svg(io::nyquist_plot(curves, fmt::format("Nyquist plot, {} rpm", io::format_number(rpm[i]))));
        return w;
    };

    std::vector<std::future<Work>> jobs;
    for (std::size_t i = 0; i < speeds.size(); ++i) jobs.push_back(std::async(std::launch::async, run, i));
    json entries = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto w = jobs[i].get();
        emit(common.out, "nyquist_" + speed_tag(rpm[i]) + ".svg", w.svg, result.files);
        entries.push_back({{"speed_rpm", number(w.entry.speed_rpm)},
                           {"circle_count", w.entry.circle_count},
                           {"frequencies_hz", numbers(w.entry.frequencies_hz)},
                           {"loss_factors", numbers(w.entry.loss_factors)}});
        result.entries.push_back(std::move(w.entry));
    }
    json doc;
    doc["dof"] = dof_name(system, result.dof);
    doc["band_hz"] = {number(band_hz.first), number(band_hz.second)};
    doc["source"] = measured ? "estimated" : "synthesized";
    if (measured) {
        doc["seed"] = seed;
        doc["noise_to_signal"] = number(options.noise_to_signal);
        doc["averages"] = options.averages;
    }
    doc["results"] = entries;
    result.report_json = dump(doc);
    emit(common.out, "nyquist_report.json", result.report_json, result.files);
    return result;
}

RoundtripResult cmd_roundtrip(const CommonOptions& common, const RoundtripOptions& options) {
    pick_format(common, "json", {"json"}, "roundtrip");
    if (options.averages < 1) throw ValidationError("averages must be >= 1");
    const auto seed = resolve_seed(common.seed);
    const auto system = at_speed(load_rotor(common), options.speed_rpm);
    const auto dof = resolve_dof(system, options.dof);
    prepare_output_dir(common.out);

    signal::ImpactSetup setup;
    setup.hit_dof = dof;
    setup.response_dofs = {dof};
    setup.sample_rate = options.sample_rate;
    setup.samples = options.samples;
    setup.pulse = {2.0 / options.sample_rate, 1.0};
    setup.averages = options.averages;
    const auto set = signal::add_input_noise(signal::simulate_impact(system, setup), options.noise_to_signal, seed);
    const auto est = signal::estimate(set, 0);
    const double nyq = options.sample_rate / 2.0;

    // Ground truth: hysteretic poles of the modes that move this DOF.
    const auto poles = rotor::hysteretic_modes(system);
    const auto shapes = rotor::whirl_eigen(system);
    if (poles.size() != shapes.size()) throw NumericError("pole and mode counts disagree");
    std::vector<rotor::HystereticMode> truth;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const double f = rad_per_s_to_hz(poles[i].frequency);
        if (std::norm(shapes[i].eigenvector(static_cast<Eigen::Index>(dof))) >= 1e-6 && f >= 0.1 * nyq && f <= 0.8 * nyq)
            truth.push_back(poles[i]);
    }
    if (truth.empty())
        throw ValidationError(fmt::format("no mode of DOF {} lies inside the analysis band", dof_name(system, dof)));

    RoundtripResult result;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (i == 0 || truth[i].frequency - truth[i - 1].frequency > 1e-6 * truth[i].frequency) ++result.expected_circles;
    result.grid_step_hz = options.sample_rate / static_cast<double>(options.samples);
    result.window_decay_rate = est.window_decay_rate;

    const nyquist::Band band{std::max(0.6 * truth.front().frequency, hz_to_rad_per_s(0.1 * nyq)),
                             std::min(1.3 * truth.back().frequency, hz_to_rad_per_s(0.8 * nyq))};
    const auto curve = est.curve(options.estimator, true, std::pair{rad_per_s_to_hz(band.lo), rad_per_s_to_hz(band.hi)});
    const auto split = nyquist::detect_mode_split(curve, band);

    json modes = json::array();
    for (const auto& raw : split.modes) {
        const auto m = nyquist::remove_window_damping(raw, est.window_decay_rate);
        const auto& t = *std::min_element(truth.begin(), truth.end(), [&m](const auto& x, const auto& y) {
            return std::abs(x.frequency - m.natural_frequency) < std::abs(y.frequency - m.natural_frequency);
        });
        RoundtripMode r;
        r.true_frequency_hz = rad_per_s_to_hz(t.frequency);
        r.frequency_hz = rad_per_s_to_hz(m.natural_frequency);
        r.frequency_error_hz = std::abs(r.frequency_hz - r.true_frequency_hz);
        r.true_loss_factor = t.loss_factor;
        r.loss_factor = m.loss_factor;
        r.loss_factor_rel_error =
            t.loss_factor > 0.0 ? std::abs(m.loss_factor - t.loss_factor) / t.loss_factor : std::abs(m.loss_factor);
        modes.push_back({{"true_freq_hz", number(r.true_frequency_hz)},
                         {"freq_hz", number(r.frequency_hz)},
                         {"freq_error_hz", number(r.frequency_error_hz)},
                         {"freq_error_grid_steps", number(r.frequency_error_hz / result.grid_step_hz)},
                         {"true_loss_factor", number(r.true_loss_factor)},
                         {"loss_factor", number(r.loss_factor)},
                         {"loss_factor_rel_error", number(r.loss_factor_rel_error)}});
        result.modes.push_back(r);
    }

    json doc;
    doc["speed_rpm"] = number(rad_per_s_to_rpm(system.spin_speed));
    doc["dof"] = dof_name(system, dof);
    doc["estimator"] = options.estimator == signal::Estimator::H1 ? "H1" : "H2";
    doc["averages"] = options.averages;
    doc["noise_to_signal"] = number(options.noise_to_signal);
    doc["seed"] = seed;
    doc["sample_rate"] = number(options.sample_rate);
    doc["samples"] = options.samples;
    doc["grid_step_hz"] = number(result.grid_step_hz);
    doc["window_decay_rate"] = number(result.window_decay_rate);
    doc["expected_circles"] = result.expected_circles;
    doc["circle_count"] = split.circle_count;
    doc["modes"] = modes;
    result.report_json = dump(doc);
    emit(common.out, "roundtrip.json", result.report_json, result.files);

    auto synthesized = frf::rotor_receptance(system, {dof, dof}, curve.grid);
    synthesized.metadata["label"] = "synthesized";
    auto measured = curve;
    measured.metadata["label"] = "estimated";
    const std::vector<frf::FrfCurve> both{synthesized, measured};
    emit(common.out, "roundtrip_nyquist.svg", io::emit_svg(io::nyquist_plot(both, "Round trip")), result.files);
    return result;
}

SynthResult cmd_synth(const CommonOptions& common, const SynthOptions& options) {
    const auto format = pick_format(common, "csv", {"csv", "uff", "json"}, "synth");
    if (common.grid < 2) throw ValidationError("--grid must be at least 2");
    const auto system = at_speed(load_rotor(common), options.speed_rpm);
    const auto j = resolve_dof(system, options.response);
    const auto k = resolve_dof(system, options.reference);
    prepare_output_dir(common.out);

    std::pair<double, double> band;
    if (options.band_hz) {
        band = *options.band_hz;
    } else {
        const auto modes = rotor::whirl_eigen(system);
        band = {0.0, 1.3 * rad_per_s_to_hz(modes.back().frequency)};
    }
    const auto grid = frf::linear_grid(hz_to_rad_per_s(band.first), hz_to_rad_per_s(band.second), common.grid);
    SynthResult result;
    auto curve = frf::rotor_receptance(system, {j, k}, grid);
    if (options.kind == frf::FrfKind::Mobility) curve = frf::to_mobility(curve);
    if (options.kind == frf::FrfKind::Accelerance) curve = frf::to_accelerance(curve);
    curve.metadata["speed_rpm"] = io::format_number(rad_per_s_to_rpm(system.spin_speed));
    result.curve = curve;

    write_curve(common.out, "frf", curve, format, system.dof_labels, result.files);
    const std::vector<frf::FrfCurve> one{curve};
    emit(common.out, "frf_nyquist.svg", io::emit_svg(io::nyquist_plot(one, "Nyquist plot")), result.files);
    emit(common.out, "frf_bode.svg", io::emit_svg(io::bode_plot(curve, "Bode plot")), result.files);
    emit(common.out, "frf_realimag.svg", io::emit_svg(io::real_imag_plot(curve, "Real and imaginary parts")), result.files);
    return result;
}

MeasureResult cmd_measure(const CommonOptions& common, const MeasureOptions& options) {
    const auto format = pick_format(common, "csv", {"csv", "uff", "json"}, "measure");
    const auto seed = resolve_seed(common.seed);
    const auto system = at_speed(load_rotor(common), options.speed_rpm);
    const auto hit = resolve_dof(system, options.hit);
    const auto response = resolve_dof(system, options.response);
    prepare_output_dir(common.out);

    signal::ImpactSetup setup;
    setup.hit_dof = hit;
    setup.response_dofs = {response};
    setup.sample_rate = options.sample_rate;
    setup.samples = options.samples;
    setup.pulse = {options.pulse_width.value_or(2.0 / options.sample_rate), 1.0};
    setup.averages = options.averages;
    const auto set = signal::add_input_noise(signal::simulate_impact(system, setup), options.noise_to_signal, seed);

    MeasureResult result;
    result.estimate = signal::estimate(set, 0);
    const auto curve = result.estimate.curve(options.estimator, true);
    if (format == "csv") {
        emit(common.out, "measured.csv", io::write_estimate_csv(result.estimate, options.estimator, true), result.files);
        emit(common.out, "measured.json", io::write_frf_sidecar(curve), result.files);
    } else if (format == "uff") {
        emit(common.out, "measured.uff", io::write_uff58(curve, io::uff_header_for(curve, system.dof_labels)), result.files);
    } else {
        std::vector<double> coherence;
        for (std::size_t b = 0; b < result.estimate.frequencies_hz.size(); ++b)
            if (result.estimate.valid[b] && result.estimate.frequencies_hz[b] > 0.0) coherence.push_back(result.estimate.coherence[b]);
        emit(common.out, "measured.json", curve_json(curve, &coherence), result.files);
    }
    if (options.records) {
        for (std::size_t h = 0; h < set.hits.size(); ++h) {
            const auto& force = set.hits[h].force;
            const auto& resp = set.hits[h].responses.front();
            emit(common.out, fmt::format("hit{}_force.f32", h + 1), io::write_time_record_raw(force), result.files);
            emit(common.out, fmt::format("hit{}_force.json", h + 1), io::write_time_record_sidecar(force), result.files);
            emit(common.out, fmt::format("hit{}_response.f32", h + 1), io::write_time_record_raw(resp), result.files);
            emit(common.out, fmt::format("hit{}_response.json", h + 1), io::write_time_record_sidecar(resp), result.files);
        }
    }
    const std::vector<frf::FrfCurve> one{curve};
    emit(common.out, "measured_nyquist.svg", io::emit_svg(io::nyquist_plot(one, "Estimated FRF")), result.files);
    return result;
}

frf::FrfCurve read_curve_file(const fs::path& path) {
    require_input(path, "input file");
    const auto ext = lower_extension(path);
    const auto text = io::read_text_file(path);
    if (ext == ".uff" || ext == ".unv") return io::read_uff58(text).front().curve;
    if (ext == ".csv") {
        auto sidecar_path = path;
        sidecar_path.replace_extension(".json");
        std::string sidecar;
        if (fs::exists(sidecar_path)) sidecar = io::read_text_file(sidecar_path);
        return io::read_frf_csv(text, sidecar);
    }
    if (ext == ".json") {
        frf::FrfCurve curve;
        try {
            const auto doc = json::parse(text);
            curve.kind = frf::kind_from_string(doc.at("kind").get<std::string>());
            const auto pair = doc.at("dof_pair").get<std::vector<std::size_t>>();
            if (pair.size() != 2) throw ValidationError("dof_pair must be [response, reference]");
            curve.dofs = {pair[0], pair[1]};
            curve.provenance = frf::provenance_from_string(doc.value("provenance", std::string("measured")));
            if (doc.contains("metadata")) curve.metadata = doc["metadata"].get<std::map<std::string, std::string>>();
            const auto f = doc.at("freq_hz").get<std::vector<double>>();
            const auto re = doc.at("real").get<std::vector<double>>();
            const auto im = doc.at("imag").get<std::vector<double>>();
            if (f.size() != re.size() || f.size() != im.size()) throw ValidationError("freq_hz, real and imag lengths differ");
            curve.grid.clear();
            curve.values.clear();
            for (std::size_t i = 0; i < f.size(); ++i) {
                curve.grid.push_back(hz_to_rad_per_s(f[i]));
                curve.values.emplace_back(re[i], im[i]);
            }
        } catch (const json::exception& e) {
            throw ParseError(0, std::string("curve JSON: ") + e.what());
        }
        curve.validate();
        return curve;
    }
    throw ValidationError(fmt::format("unrecognized curve file extension '{}'", ext));
}

ExtractResult cmd_extract(const CommonOptions& common, const ExtractOptions& options) {
    const auto format = pick_format(common, "csv", {"csv", "json"}, "extract");
    auto curve = read_curve_file(options.input);
    prepare_output_dir(common.out);

    if (curve.kind != frf::FrfKind::Receptance) {
        if (!curve.grid.empty() && curve.grid.front() == 0.0) {
            curve.grid.erase(curve.grid.begin());
            curve.values.erase(curve.values.begin());
        }
        curve = frf::to_receptance(curve);
    }
    nyquist::Band band{curve.grid.front(), curve.grid.back()};
    if (options.band_hz) band = {hz_to_rad_per_s(options.band_hz->first), hz_to_rad_per_s(options.band_hz->second)};
    double window = 0.0;
    if (options.window_decay_rate) {
        window = *options.window_decay_rate;
    } else if (auto it = curve.metadata.find("window_decay_rate"); it != curve.metadata.end()) {
        window = parse_number(it->second, "window_decay_rate metadata");
    }

    ExtractResult result;
    result.report = nyquist::detect_mode_split(curve, band);
    for (auto& m : result.report.modes) m = nyquist::remove_window_damping(m, window);
    if (format == "csv")
        emit(common.out, "modes.csv", io::write_modes_csv(result.report.modes), result.files);
    else
        emit(common.out, "modes.json", io::write_modes_json(result.report.modes), result.files);
    const std::vector<frf::FrfCurve> one{curve};
    emit(common.out, "extract_nyquist.svg", io::emit_svg(io::nyquist_plot(one, "Extraction input")), result.files);
    return result;
}

std::vector<fs::path> cmd_convert(const CommonOptions& common, const ConvertOptions& options) {
    require_input(options.input, "input file");
    const auto ext = lower_extension(options.input);
    const bool from_uff = ext == ".uff" || ext == ".unv";
    const auto format = pick_format(common, from_uff ? "csv" : "uff", {"csv", "uff", "json"}, "convert");
    const auto stem = options.input.stem().string();
    std::vector<frf::FrfCurve> curves;
    if (from_uff) {
        for (auto& rec : io::read_uff58(io::read_text_file(options.input))) curves.push_back(std::move(rec.curve));
    } else {
        curves.push_back(read_curve_file(options.input));
    }
    prepare_output_dir(common.out);

    std::vector<fs::path> files;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto name = curves.size() == 1 ? stem : fmt::format("{}_{}", stem, i + 1);
        const auto target = common.out / name;
        if (fs::absolute(options.input) == fs::absolute(target).replace_extension(format == "uff" ? ".uff" : "." + format))
            throw ValidationError("conversion would overwrite its input");
        write_curve(common.out, name, curves[i], format, {}, files);
    }
    return files;
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::Validation:
            case ErrorKind::Parse: return 1;
            case ErrorKind::Numeric: return 2;
            case ErrorKind::Io: return 3;
        }
    }
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return 3;
    return 2;
}

}  // namespace whirlbench::cli
