#pragma once

#include <span>
#include <string>
#include <string_view>

#include "whirlbench/frf.hpp"
#include "whirlbench/nyquist.hpp"
#include "whirlbench/rotor.hpp"
#include "whirlbench/signal.hpp"

namespace whirlbench::io {

/// Columns freq_hz, real, imag.
std::string write_frf_csv(const frf::FrfCurve& curve);
/// {"kind", "dof_pair": [response, reference], "provenance", "metadata"}.
std::string write_frf_sidecar(const frf::FrfCurve& curve);
/// Extra columns are ignored. Without a sidecar the curve is a receptance
/// at (0, 0) tagged measured.
frf::FrfCurve read_frf_csv(std::string_view csv, std::string_view sidecar = {});

/// FRF columns plus coherence, over the bins FrfEstimate::curve keeps.
std::string write_estimate_csv(const signal::FrfEstimate& estimate, signal::Estimator which, bool as_receptance);

/// Columns speed_rpm, branch_id, direction, freq_hz; one row per speed and branch.
std::string write_campbell_csv(const rotor::CampbellDiagram& diagram);

/// Columns freq_hz, loss_factor, modal_constant_mag, modal_constant_phase_deg,
/// circle_center_re, circle_center_im, radius, residual.
std::string write_modes_csv(std::span<const nyquist::ModeEstimate> modes);
std::string write_modes_json(std::span<const nyquist::ModeEstimate> modes);

/// Raw little-endian float32 samples with a JSON sidecar
/// {"sample_rate", "samples", "role", "units", "encoding": "float32le"}.
std::string write_time_record_raw(const signal::TimeRecord& record);
std::string write_time_record_sidecar(const signal::TimeRecord& record);
signal::TimeRecord read_time_record_raw(std::string_view bytes, std::string_view sidecar);

/// Columns time_s, value. The sample rate is recovered from the time column.
std::string write_time_record_csv(const signal::TimeRecord& record);
signal::TimeRecord read_time_record_csv(std::string_view csv, signal::ChannelRole role);

}  // namespace whirlbench::io
