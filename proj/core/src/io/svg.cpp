#include "whirlbench/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "whirlbench/error.hpp"
#include "whirlbench/units.hpp"

namespace whirlbench::io {

namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 480.0;
constexpr double kTitleHeight = 30.0;
constexpr double kLeft = 80.0, kRight = 20.0, kTop = 20.0, kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string coord(double v) { return fmt::format("{:.4f}", v); }

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span() const { return hi - lo; }
    void widen() {
        if (span() > 0.0) return;
        const double half = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
        lo -= half;
        hi += half;
    }
};

double nice_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

void check(const PlotSpec& spec) {
    if (spec.panels.empty()) throw ValidationError("plot has no data");
    std::vector<std::string> bad;
    for (std::size_t p = 0; p < spec.panels.size(); ++p) {
        const auto& panel = spec.panels[p];
        std::size_t points = 0;
        for (std::size_t s = 0; s < panel.series.size(); ++s) {
            const auto& series = panel.series[s];
            if (series.x.size() != series.y.size())
                throw ValidationError(fmt::format("panel {} series {}: x and y lengths differ", p, s));
            points += series.x.size();
            for (std::size_t i = 0; i < series.x.size(); ++i)
                if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) bad.push_back(fmt::format("{}/{}/{}", p, s, i));
        }
        if (points == 0) throw ValidationError(fmt::format("panel {} has no data", p));
    }
    if (!bad.empty()) {
        std::string list;
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i) list += (i ? ", " : "") + bad[i];
        if (bad.size() > 20) list += fmt::format(", ... ({} total)", bad.size());
        throw ValidationError("non-finite plot values at panel/series/point " + list);
    }
}

void draw_panel(std::string& out, const Panel& panel, double top) {
    Range xr, yr;
    for (const auto& s : panel.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.add(s.x[i]);
            yr.add(s.y[i]);
        }
    xr.widen();
    yr.widen();
    // 5% margin so curves do not touch the frame.
    const double mx = 0.05 * xr.span(), my = 0.05 * yr.span();
    xr.lo -= mx, xr.hi += mx, yr.lo -= my, yr.hi += my;

    const double area_w = kWidth - kLeft - kRight;
    const double area_h = kPanelHeight - kTop - kBottom;
    double sx = area_w / xr.span(), sy = area_h / yr.span();
    double ox = kLeft, oy = top + kTop;
    if (panel.equal_aspect) {
        const double s = std::min(sx, sy);
        ox += 0.5 * (area_w - s * xr.span());
        oy += 0.5 * (area_h - s * yr.span());
        sx = sy = s;
    }
    const double w = sx * xr.span(), h = sy * yr.span();
    auto px = [&](double x) { return ox + (x - xr.lo) * sx; };
    auto py = [&](double y) { return oy + h - (y - yr.lo) * sy; };

    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000\"/>\n", coord(ox),
                       coord(oy), coord(w), coord(h));
    const double xs = nice_step(xr.span()), ys = nice_step(yr.span());
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi; t += xs) {
        const double v = std::abs(t) < 1e-9 * xs ? 0.0 : t;
        out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", coord(px(v)), coord(oy), coord(oy + h));
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:.4g}</text>\n", coord(px(v)),
                           coord(oy + h + 15), v);
    }
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi; t += ys) {
        const double v = std::abs(t) < 1e-9 * ys ? 0.0 : t;
        out += fmt::format("<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#ddd\"/>\n", coord(py(v)), coord(ox), coord(ox + w));
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n", coord(ox - 4),
                           coord(py(v) + 4), v);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n", coord(kLeft + area_w / 2),
                       coord(top + kPanelHeight - 12), escape(panel.x_label));
    out += fmt::format("<text x=\"14\" y=\"{0}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">{1}</text>\n",
                       coord(top + kTop + area_h / 2), escape(panel.y_label));

    for (std::size_t s = 0; s < panel.series.size(); ++s) {
        const auto& series = panel.series[s];
        if (series.x.empty()) continue;
        const char* color = kPalette[s % std::size(kPalette)];
        if (series.markers) {
            for (std::size_t i = 0; i < series.x.size(); ++i)
                out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"{}\"/>\n", coord(px(series.x[i])), coord(py(series.y[i])), color);
        } else {
            std::string d;
            for (std::size_t i = 0; i < series.x.size(); ++i)
                d += fmt::format("{}{},{}", i == 0 ? "M" : " L", coord(px(series.x[i])), coord(py(series.y[i])));
            out += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"/>\n", d, color);
        }
        if (!series.label.empty())
            out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{}\">{}</text>\n", coord(ox + w - 90),
                               coord(oy + 14 + 14 * static_cast<double>(s)), color, escape(series.label));
    }
}

}  // namespace

std::string emit_svg(const PlotSpec& spec) {
    check(spec);
    const double height = kTitleHeight + kPanelHeight * static_cast<double>(spec.panels.size());
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\">\n",
        coord(kWidth), coord(height), coord(kWidth), coord(height));
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    out += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n", coord(kWidth / 2), escape(spec.title));
    for (std::size_t p = 0; p < spec.panels.size(); ++p)
        draw_panel(out, spec.panels[p], kTitleHeight + kPanelHeight * static_cast<double>(p));
    out += "</svg>\n";
    return out;
}

PlotSpec nyquist_plot(std::span<const frf::FrfCurve> curves, const std::string& title) {
    PlotSpec spec{PlotKind::Nyquist, title, {}};
    Panel panel{"Real", "Imaginary", {}, true};
    for (const auto& c : curves) {
        Series s;
        s.label = c.metadata.contains("label") ? c.metadata.at("label") : std::string();
        for (const auto& v : c.values) {
            s.x.push_back(v.real());
            s.y.push_back(v.imag());
        }
        panel.series.push_back(std::move(s));
    }
    spec.panels.push_back(std::move(panel));
    return spec;
}

PlotSpec bode_plot(const frf::FrfCurve& curve, const std::string& title) {
    PlotSpec spec{PlotKind::Bode, title, {}};
    Series mag, phase;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double f = rad_per_s_to_hz(curve.grid[i]);
        const double a = std::abs(curve.values[i]);
        if (a > 0.0) {
            mag.x.push_back(f);
            mag.y.push_back(std::log10(a));
        }
        phase.x.push_back(f);
        phase.y.push_back(std::arg(curve.values[i]) * 180.0 / std::numbers::pi);
    }
    spec.panels.push_back({"Frequency (Hz)", "log10 |H|", {std::move(mag)}, false});
    spec.panels.push_back({"Frequency (Hz)", "Phase (deg)", {std::move(phase)}, false});
    return spec;
}

PlotSpec real_imag_plot(const frf::FrfCurve& curve, const std::string& title) {
    PlotSpec spec{PlotKind::RealImag, title, {}};
    Series re, im;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double f = rad_per_s_to_hz(curve.grid[i]);
        re.x.push_back(f);
        re.y.push_back(curve.values[i].real());
        im.x.push_back(f);
        im.y.push_back(curve.values[i].imag());
    }
    spec.panels.push_back({"Frequency (Hz)", "Real", {std::move(re)}, false});
    spec.panels.push_back({"Frequency (Hz)", "Imaginary", {std::move(im)}, false});
    return spec;
}

PlotSpec campbell_plot(const rotor::CampbellDiagram& diagram, const std::string& title) {
    PlotSpec spec{PlotKind::Campbell, title, {}};
    Panel panel{"Speed (rpm)", "Frequency (Hz)", {}, false};
    for (const auto& b : diagram.branches) {
        Series s;
        s.label = fmt::format("{} {}", b.id, rotor::to_string(b.direction));
        for (std::size_t i = 0; i < diagram.spin_speeds.size(); ++i) {
            s.x.push_back(rad_per_s_to_rpm(diagram.spin_speeds[i]));
            s.y.push_back(rad_per_s_to_hz(b.frequencies[i]));
        }
        panel.series.push_back(std::move(s));
    }
    spec.panels.push_back(std::move(panel));
    return spec;
}

}  // namespace whirlbench::io
