#include "whirlbench/io/csv.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "whirlbench/error.hpp"
#include "whirlbench/io/format.hpp"
#include "whirlbench/units.hpp"

namespace whirlbench::io {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || field.empty())
        throw ParseError(line, fmt::format("'{}' is not a number", field));
    return value;
}

/// Header plus rows of numbers; returns rows keyed by requested column names.
struct Table {
    std::vector<std::vector<double>> columns;
    std::vector<std::size_t> lines;
};

Table read_table(std::string_view text, std::span<const std::string_view> wanted) {
    const auto rows = split(text, '\n');
    std::size_t first = 0;
    while (first < rows.size() && trim(rows[first]).empty()) ++first;
    if (first == rows.size()) throw ParseError(1, "empty CSV");
    const auto header = split(trim(rows[first]), ',');
    std::vector<std::size_t> where;
    for (auto name : wanted) {
        std::size_t found = header.size();
        for (std::size_t c = 0; c < header.size(); ++c)
            if (trim(header[c]) == name) found = c;
        if (found == header.size()) throw ParseError(first + 1, fmt::format("missing column '{}'", name));
        where.push_back(found);
    }
    Table table;
    table.columns.resize(wanted.size());
    for (std::size_t r = first + 1; r < rows.size(); ++r) {
        const auto row = trim(rows[r]);
        if (row.empty()) continue;
        const auto fields = split(row, ',');
        if (fields.size() != header.size())
            throw ParseError(r + 1, fmt::format("expected {} fields, found {}", header.size(), fields.size()));
        for (std::size_t c = 0; c < where.size(); ++c) table.columns[c].push_back(parse_double(fields[where[c]], r + 1));
        table.lines.push_back(r + 1);
    }
    if (table.lines.empty()) throw ParseError(first + 1, "CSV has a header but no data rows");
    return table;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("invalid JSON: ") + e.what());
    }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

/// JSON number through the 9-digit formatter so files stay byte-stable.
json number(double value) { return json::parse(format_number(value)); }

}  // namespace

std::string write_frf_csv(const frf::FrfCurve& curve) {
    curve.validate();
    std::string out = "freq_hz,real,imag\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        out += fmt::format("{},{},{}\n", format_number(rad_per_s_to_hz(curve.grid[i])),
                           format_number(curve.values[i].real()), format_number(curve.values[i].imag()));
    return out;
}

std::string write_frf_sidecar(const frf::FrfCurve& curve) {
    json doc;
    doc["kind"] = frf::to_string(curve.kind);
    doc["dof_pair"] = {curve.dofs.response, curve.dofs.reference};
    doc["provenance"] = frf::to_string(curve.provenance);
    doc["metadata"] = json::object();
    for (const auto& [k, v] : curve.metadata) doc["metadata"][k] = v;
    return dump(doc);
}

frf::FrfCurve read_frf_csv(std::string_view csv, std::string_view sidecar) {
    static constexpr std::string_view cols[] = {"freq_hz", "real", "imag"};
    const auto table = read_table(csv, cols);
    frf::FrfCurve curve;
    curve.provenance = frf::Provenance::Measured;
    for (std::size_t i = 0; i < table.lines.size(); ++i) {
        const double w = hz_to_rad_per_s(table.columns[0][i]);
        if (i > 0 && !(w > curve.grid.back()))
            throw ParseError(table.lines[i], "frequency column is not strictly increasing");
        curve.grid.push_back(w);
        curve.values.emplace_back(table.columns[1][i], table.columns[2][i]);
    }
    if (!sidecar.empty()) {
        const auto doc = parse_json(sidecar);
        try {
            curve.kind = frf::kind_from_string(doc.at("kind").get<std::string>());
            const auto& pair = doc.at("dof_pair");
            if (!pair.is_array() || pair.size() != 2) throw ValidationError("dof_pair must be [response, reference]");
            curve.dofs = {pair[0].get<std::size_t>(), pair[1].get<std::size_t>()};
            if (doc.contains("provenance"))
                curve.provenance = frf::provenance_from_string(doc["provenance"].get<std::string>());
            if (doc.contains("metadata"))
                for (const auto& [k, v] : doc["metadata"].items()) curve.metadata[k] = v.get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError(0, std::string("FRF sidecar: ") + e.what());
        }
    }
    curve.validate();
    return curve;
}

std::string write_estimate_csv(const signal::FrfEstimate& estimate, signal::Estimator which, bool as_receptance) {
    const auto curve = estimate.curve(which, as_receptance);
    std::string out = "freq_hz,real,imag,coherence\n";
    std::size_t row = 0;
    for (std::size_t k = 0; k < estimate.frequencies_hz.size() && row < curve.size(); ++k) {
        if (!estimate.valid[k] || estimate.frequencies_hz[k] <= 0.0) continue;
        out += fmt::format("{},{},{},{}\n", format_number(estimate.frequencies_hz[k]),
                           format_number(curve.values[row].real()), format_number(curve.values[row].imag()),
                           format_number(estimate.coherence[k]));
        ++row;
    }
    return out;
}

std::string write_campbell_csv(const rotor::CampbellDiagram& diagram) {
    std::string out = "speed_rpm,branch_id,direction,freq_hz\n";
    for (std::size_t s = 0; s < diagram.spin_speeds.size(); ++s)
        for (const auto& branch : diagram.branches)
            out += fmt::format("{},{},{},{}\n", format_number(rad_per_s_to_rpm(diagram.spin_speeds[s])), branch.id,
                               rotor::to_string(branch.direction),
                               format_number(rad_per_s_to_hz(branch.frequencies[s])));
    return out;
}

std::string write_modes_csv(std::span<const nyquist::ModeEstimate> modes) {
    std::string out =
        "freq_hz,loss_factor,modal_constant_mag,modal_constant_phase_deg,circle_center_re,circle_center_im,radius,residual\n";
    for (const auto& m : modes) {
        const auto& c = m.source_circle;
        out += fmt::format("{},{},{},{},{},{},{},{}\n", format_number(rad_per_s_to_hz(m.natural_frequency)),
                           format_number(m.loss_factor), format_number(std::abs(m.modal_constant)),
                           format_number(std::arg(m.modal_constant) * 180.0 / std::numbers::pi),
                           format_number(c.center.real()), format_number(c.center.imag()), format_number(c.radius),
                           format_number(c.rms_residual));
    }
    return out;
}

std::string write_modes_json(std::span<const nyquist::ModeEstimate> modes) {
    json doc = json::array();
    for (const auto& m : modes) {
        const auto& c = m.source_circle;
        doc.push_back({{"freq_hz", number(rad_per_s_to_hz(m.natural_frequency))},
                       {"loss_factor", number(m.loss_factor)},
                       {"modal_constant_mag", number(std::abs(m.modal_constant))},
                       {"modal_constant_phase_deg", number(std::arg(m.modal_constant) * 180.0 / std::numbers::pi)},
                       {"circle_center_re", number(c.center.real())},
                       {"circle_center_im", number(c.center.imag())},
                       {"radius", number(c.radius)},
                       {"residual", number(c.rms_residual)},
                       {"converged", c.converged}});
    }
    return dump(doc);
}

std::string write_time_record_raw(const signal::TimeRecord& record) {
    std::string out(record.samples.size() * 4, '\0');
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(record.samples[i]));
        for (int b = 0; b < 4; ++b) out[i * 4 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    return out;
}

std::string write_time_record_sidecar(const signal::TimeRecord& record) {
    json doc;
    doc["sample_rate"] = number(record.sample_rate);
    doc["samples"] = record.samples.size();
    doc["role"] = signal::to_string(record.role);
    doc["units"] = record.units;
    doc["encoding"] = "float32le";
    return dump(doc);
}

signal::TimeRecord read_time_record_raw(std::string_view bytes, std::string_view sidecar) {
    const auto doc = parse_json(sidecar);
    signal::TimeRecord record;
    std::size_t count = 0;
    try {
        if (doc.at("encoding").get<std::string>() != "float32le") throw ValidationError("unsupported sample encoding");
        record.sample_rate = doc.at("sample_rate").get<double>();
        count = doc.at("samples").get<std::size_t>();
        record.role = signal::role_from_string(doc.at("role").get<std::string>());
        if (doc.contains("units")) record.units = doc["units"].get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("time record sidecar: ") + e.what());
    }
    if (bytes.size() != count * 4)
        throw ParseError(0, fmt::format("sidecar declares {} samples but the data holds {} bytes", count, bytes.size()));
    record.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + static_cast<std::size_t>(b)])) << (8 * b);
        record.samples[i] = std::bit_cast<float>(bits);
    }
    record.validate();
    return record;
}

std::string write_time_record_csv(const signal::TimeRecord& record) {
    std::string out = "time_s,value\n";
    for (std::size_t i = 0; i < record.samples.size(); ++i)
        out += fmt::format("{},{}\n", format_number(static_cast<double>(i) / record.sample_rate),
                           format_number(record.samples[i]));
    return out;
}

signal::TimeRecord read_time_record_csv(std::string_view csv, signal::ChannelRole role) {
    static constexpr std::string_view cols[] = {"time_s", "value"};
    const auto table = read_table(csv, cols);
    if (table.lines.size() < 2) throw ParseError(table.lines.front(), "time record needs at least two samples");
    const auto& t = table.columns[0];
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0)) throw ParseError(table.lines.front(), "time column is not increasing");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) throw ParseError(table.lines[i], "time column is not evenly spaced");
    signal::TimeRecord record;
    record.sample_rate = 1.0 / dt;
    record.samples = table.columns[1];
    record.role = role;
    record.validate();
    return record;
}

}  // namespace whirlbench::io
