#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "whirlbench/frf.hpp"
#include "whirlbench/nyquist.hpp"
#include "whirlbench/rotor.hpp"
#include "whirlbench/signal.hpp"

namespace whirlbench::cli {

/// Seed used when neither --seed nor WHIRLBENCH_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 1729;

struct CommonOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = "whirlbench-out";
    std::optional<std::uint64_t> seed;
    std::size_t grid = 801;
    /// csv, uff or json; each command has its own default.
    std::optional<std::string> format;
};

/// --seed, else WHIRLBENCH_SEED, else kDefaultSeed.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag);

/// "0,500,1000" or "start:stop:step" in rpm.
std::vector<double> parse_speed_list(const std::string& text);
/// "lo,hi" in Hz.
std::pair<double, double> parse_band(const std::string& text);

/// Default rotor unless a config file is given. A missing file is a
/// validation error.
rotor::RotorSystem load_rotor(const CommonOptions& common);

/// DOF by index ("2") or by direction name ("tilt_y"), first match.
std::size_t resolve_dof(const rotor::RotorSystem& system, const std::string& text);

/// Creates the directory and proves it writable; IoError otherwise.
void prepare_output_dir(const std::filesystem::path& dir);

inline const std::vector<double> kDefaultSweepRpm{0, 30, 1000, 2000, 3000, 4000, 6000};

struct CampbellOptions {
    /// Default 0..6000 rpm in 500 rpm steps.
    std::optional<std::vector<double>> speeds_rpm;
};

struct CampbellResult {
    rotor::CampbellDiagram diagram;
    std::vector<std::filesystem::path> files;
};

CampbellResult cmd_campbell(const CommonOptions& common, const CampbellOptions& options);

struct SweepOptions {
    std::optional<std::vector<double>> speeds_rpm;
    /// Simulate impacts and estimate instead of synthesizing directly.
    bool measured = false;
    double noise_to_signal = 0.0;
    std::size_t averages = 1;
};

struct SweepEntry {
    double speed_rpm = 0.0;
    int circle_count = 0;
    std::vector<double> frequencies_hz;
    std::vector<double> loss_factors;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::size_t dof = 0;
    nyquist::Band band;  // rad/s
    std::string report_json;
    std::vector<std::filesystem::path> files;
};

/// Drive-point receptance at the DOF dominating the most gyroscopically split
/// whirl pair, over [0.6 BW, 1.3 FW] of that pair at the top speed.
SweepResult cmd_nyquist_sweep(const CommonOptions& common, const SweepOptions& options);

struct RoundtripOptions {
    /// rpm; the configured spin speed when absent.
    std::optional<double> speed_rpm;
    std::string dof = "tilt_y";
    double noise_to_signal = 0.0;
    std::size_t averages = 1;
    signal::Estimator estimator = signal::Estimator::H2;
    double sample_rate = 2048.0;
    std::size_t samples = 8192;
};

struct RoundtripMode {
    double true_frequency_hz = 0.0;
    double frequency_hz = 0.0;
    double frequency_error_hz = 0.0;
    double true_loss_factor = 0.0;
    double loss_factor = 0.0;
    double loss_factor_rel_error = 0.0;
};

struct RoundtripResult {
    std::vector<RoundtripMode> modes;
    std::size_t expected_circles = 0;
    double grid_step_hz = 0.0;
    double window_decay_rate = 0.0;
    std::string report_json;
    std::vector<std::filesystem::path> files;
};

RoundtripResult cmd_roundtrip(const CommonOptions& common, const RoundtripOptions& options);

struct SynthOptions {
    std::optional<double> speed_rpm;
    std::string response = "tilt_y";
    std::string reference = "tilt_y";
    /// Hz; default 0 to 1.3 times the highest natural frequency.
    std::optional<std::pair<double, double>> band_hz;
    frf::FrfKind kind = frf::FrfKind::Receptance;
};

struct SynthResult {
    frf::FrfCurve curve;
    std::vector<std::filesystem::path> files;
};

SynthResult cmd_synth(const CommonOptions& common, const SynthOptions& options);

struct MeasureOptions {
    std::optional<double> speed_rpm;
    std::string hit = "tilt_y";
    std::string response = "tilt_y";
    double sample_rate = 2048.0;
    std::size_t samples = 8192;
    std::size_t averages = 1;
    double noise_to_signal = 0.0;
    /// s; default two sample intervals, which keeps the force spectrum flat to Nyquist.
    std::optional<double> pulse_width;
    signal::Estimator estimator = signal::Estimator::H2;
    /// Also write every time record as float32 with a JSON sidecar.
    bool records = false;
};

struct MeasureResult {
    signal::FrfEstimate estimate;
    std::vector<std::filesystem::path> files;
};

MeasureResult cmd_measure(const CommonOptions& common, const MeasureOptions& options);

struct ExtractOptions {
    std::filesystem::path input;
    std::optional<std::pair<double, double>> band_hz;
    /// 1/s; defaults to the window_decay_rate recorded with the curve.
    std::optional<double> window_decay_rate;
};

struct ExtractResult {
    nyquist::SplitReport report;
    std::vector<std::filesystem::path> files;
};

ExtractResult cmd_extract(const CommonOptions& common, const ExtractOptions& options);

struct ConvertOptions {
    std::filesystem::path input;
};

/// UFF-58 to CSV (+ sidecar) or CSV to UFF-58, chosen by the input extension.
std::vector<std::filesystem::path> cmd_convert(const CommonOptions& common, const ConvertOptions& options);

/// Reads a curve from .csv (sidecar at the same stem with .json) or .uff/.unv.
frf::FrfCurve read_curve_file(const std::filesystem::path& path);

/// Exit code for an exception: 1 validation/parse, 2 numeric, 3 I/O.
int exit_code_for(const std::exception& e);

}  // namespace whirlbench::cli
