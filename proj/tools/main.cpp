#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "whirlbench/error.hpp"
#include "whirlbench/frf.hpp"
#include "whirlbench/units.hpp"

namespace wc = whirlbench::cli;

namespace {

whirlbench::signal::Estimator estimator_from(const std::string& name) {
    if (name == "H1" || name == "h1") return whirlbench::signal::Estimator::H1;
    if (name == "H2" || name == "h2") return whirlbench::signal::Estimator::H2;
    throw whirlbench::ValidationError("estimator must be H1 or H2");
}

void report(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) fmt::print("wrote {}\n", f.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rotor FRF synthesis, virtual impact testing and Nyquist circle-fit extraction"};
    app.require_subcommand(1);
    app.fallthrough();

    wc::CommonOptions common;
    std::string config, format;
    std::uint64_t seed = 0;
    app.add_option("--config", config, "Rotor configuration JSON");
    app.add_option("--out", common.out, "Output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "Noise seed (falls back to WHIRLBENCH_SEED, then 1729)");
    app.add_option("--grid", common.grid, "Frequency grid points")->capture_default_str();
    auto* format_opt = app.add_option("--format", format, "Artifact format")->check(CLI::IsMember({"csv", "uff", "json"}));

    std::string speeds, band;
    std::optional<double> speed;
    auto add_speed = [&speed](CLI::App* sub) {
        sub->add_option_function<double>("--speed", [&speed](double v) { speed = v; }, "Spin speed in rpm");
    };

    auto* campbell = app.add_subcommand("campbell", "Whirl frequencies over a speed range");
    auto* campbell_speeds = campbell->add_option("--speeds", speeds, "rpm list a,b,c or start:stop:step (default 0:6000:500)");

    wc::SweepOptions sweep;
    auto* nyq = app.add_subcommand("nyquist-sweep", "Nyquist plots and circle counts per speed");
    auto* nyq_speeds = nyq->add_option("--speeds", speeds, "rpm list (default 0,30,1000,2000,3000,4000,6000)");
    nyq->add_flag("--measured", sweep.measured, "Simulate impacts and estimate instead of synthesizing");
    nyq->add_option("--noise", sweep.noise_to_signal, "Input noise-to-signal ratio (implies --measured)");
    nyq->add_option("--averages", sweep.averages, "Impacts per estimate");

    wc::RoundtripOptions rt;
    std::string rt_estimator = "H2";
    auto* roundtrip = app.add_subcommand("roundtrip", "Synthesize, measure, extract and compare with the model");
    add_speed(roundtrip);
    roundtrip->add_option("--dof", rt.dof, "Drive-point DOF")->capture_default_str();
    roundtrip->add_option("--noise", rt.noise_to_signal, "Input noise-to-signal ratio");
    roundtrip->add_option("--averages", rt.averages, "Impacts per estimate");
    roundtrip->add_option("--estimator", rt_estimator, "H1 or H2")->capture_default_str();
    roundtrip->add_option("--fs", rt.sample_rate, "Sample rate in Hz")->capture_default_str();
    roundtrip->add_option("--samples", rt.samples, "Record length (power of two)")->capture_default_str();

    wc::SynthOptions syn;
    std::string syn_kind = "receptance";
    auto* synth = app.add_subcommand("synth", "Synthesize a rotor FRF");
    add_speed(synth);
    synth->add_option("--response", syn.response, "Response DOF")->capture_default_str();
    synth->add_option("--reference", syn.reference, "Reference DOF")->capture_default_str();
    auto* synth_band = synth->add_option("--band", band, "lo,hi in Hz");
    synth->add_option("--kind", syn_kind, "receptance, mobility or accelerance")->capture_default_str();

    wc::MeasureOptions meas;
    std::string meas_estimator = "H2";
    double pulse_width = 0.0;
    auto* measure = app.add_subcommand("measure", "Simulate impact tests and estimate the FRF");
    add_speed(measure);
    measure->add_option("--hit", meas.hit, "Hit DOF")->capture_default_str();
    measure->add_option("--response", meas.response, "Response DOF")->capture_default_str();
    measure->add_option("--fs", meas.sample_rate, "Sample rate in Hz")->capture_default_str();
    measure->add_option("--samples", meas.samples, "Record length (power of two)")->capture_default_str();
    measure->add_option("--averages", meas.averages, "Impacts")->capture_default_str();
    measure->add_option("--noise", meas.noise_to_signal, "Input noise-to-signal ratio");
    auto* pulse_opt = measure->add_option("--pulse-width", pulse_width, "Hammer pulse width in s (default 2 samples)");
    measure->add_option("--estimator", meas_estimator, "H1 or H2")->capture_default_str();
    measure->add_flag("--records", meas.records, "Write raw time records");

    wc::ExtractOptions ext;
    double window = 0.0;
    auto* extract = app.add_subcommand("extract", "Circle-fit modal parameters from an FRF file");
    extract->add_option("input", ext.input, "FRF file (.csv, .uff, .json)")->required();
    auto* extract_band = extract->add_option("--band", band, "lo,hi in Hz");
    auto* window_opt = extract->add_option("--window-rate", window, "Exponential window rate to remove (1/s)");

    wc::ConvertOptions conv;
    auto* convert = app.add_subcommand("convert", "Convert between UFF-58 and CSV");
    convert->add_option("input", conv.input, "Input file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (!config.empty()) common.config = config;
        if (seed_opt->count() > 0) common.seed = seed;
        if (format_opt->count() > 0) common.format = format;

        if (campbell->parsed()) {
            wc::CampbellOptions opts;
            if (campbell_speeds->count() > 0) opts.speeds_rpm = wc::parse_speed_list(speeds);
            const auto result = wc::cmd_campbell(common, opts);
            for (const auto& d : result.diagram.diagnostics) fmt::print(stderr, "note: {}\n", d);
            report(result.files);
        } else if (nyq->parsed()) {
            if (nyq_speeds->count() > 0) sweep.speeds_rpm = wc::parse_speed_list(speeds);
            const auto result = wc::cmd_nyquist_sweep(common, sweep);
            for (const auto& e : result.entries)
                fmt::print("{:>8} rpm  circles {}\n", e.speed_rpm, e.circle_count);
            report(result.files);
        } else if (roundtrip->parsed()) {
            rt.speed_rpm = speed;
            rt.estimator = estimator_from(rt_estimator);
            const auto result = wc::cmd_roundtrip(common, rt);
            std::cout << result.report_json;
            report(result.files);
        } else if (synth->parsed()) {
            syn.speed_rpm = speed;
            syn.kind = whirlbench::frf::kind_from_string(syn_kind);
            if (synth_band->count() > 0) syn.band_hz = wc::parse_band(band);
            report(wc::cmd_synth(common, syn).files);
        } else if (measure->parsed()) {
            meas.speed_rpm = speed;
            meas.estimator = estimator_from(meas_estimator);
            if (pulse_opt->count() > 0) meas.pulse_width = pulse_width;
            report(wc::cmd_measure(common, meas).files);
        } else if (extract->parsed()) {
            if (extract_band->count() > 0) ext.band_hz = wc::parse_band(band);
            if (window_opt->count() > 0) ext.window_decay_rate = window;
            const auto result = wc::cmd_extract(common, ext);
            for (const auto& m : result.report.modes)
                fmt::print("mode  {:.6g} Hz  loss factor {:.6g}\n", m.natural_frequency / whirlbench::kTwoPi, m.loss_factor);
            report(result.files);
        } else if (convert->parsed()) {
            report(wc::cmd_convert(common, conv));
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return wc::exit_code_for(e);
    }
    return 0;
}
