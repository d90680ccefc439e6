#pragma once

#include <span>
#include <string>
#include <vector>

#include "whirlbench/frf.hpp"
#include "whirlbench/rotor.hpp"

namespace whirlbench::io {

enum class PlotKind { Nyquist, Bode, RealImag, Campbell };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    /// Draw markers instead of a polyline.
    bool markers = false;
};

struct Panel {
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    /// One data unit spans the same length on both axes.
    bool equal_aspect = false;
};

struct PlotSpec {
    PlotKind kind = PlotKind::Nyquist;
    std::string title;
    std::vector<Panel> panels;
};

/// Fixed viewBox, 4-decimal coordinates, no timestamps. Throws ValidationError
/// on empty data or non-finite values (the message lists the offending
/// panel/series/point indices).
std::string emit_svg(const PlotSpec& spec);

PlotSpec nyquist_plot(std::span<const frf::FrfCurve> curves, const std::string& title);
/// Log magnitude and phase against frequency in Hz. Bins with zero magnitude
/// are left out of the magnitude panel.
PlotSpec bode_plot(const frf::FrfCurve& curve, const std::string& title);
PlotSpec real_imag_plot(const frf::FrfCurve& curve, const std::string& title);
PlotSpec campbell_plot(const rotor::CampbellDiagram& diagram, const std::string& title);

}  // namespace whirlbench::io
