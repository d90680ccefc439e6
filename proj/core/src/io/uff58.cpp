#include "whirlbench/io/uff58.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "whirlbench/error.hpp"
#include "whirlbench/units.hpp"

namespace whirlbench::io {

namespace {

constexpr int kAbscissaFrequency = 18;
constexpr int kForce = 13;

int ordinate_code(frf::FrfKind kind) {
    switch (kind) {
        case frf::FrfKind::Receptance: return 8;
        case frf::FrfKind::Mobility: return 11;
        case frf::FrfKind::Accelerance: return 12;
    }
    return 8;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string pad(std::string_view text, std::size_t width) {
    std::string out(text.substr(0, width));
    out.resize(width, ' ');
    return out;
}

class Lines {
public:
    explicit Lines(std::string_view text) {
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            auto line = text.substr(start, end - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines_.push_back(line);
            start = end + 1;
        }
    }

    bool done() const { return pos_ >= lines_.size(); }
    std::size_t number() const { return pos_ + 1; }
    std::size_t remaining() const { return lines_.size() - pos_; }

    std::string_view next(const char* what) {
        if (done()) throw ParseError(lines_.size() + 1, fmt::format("truncated record: expected {}", what));
        return lines_[pos_++];
    }

private:
    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
};

long long parse_int(std::string_view field, std::size_t line, const char* what) {
    field = trim(field);
    long long value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end)
        throw ParseError(line, fmt::format("malformed card: {} '{}' is not an integer", what, field));
    return value;
}

double parse_real(std::string_view token, std::size_t line) {
    std::string buf(trim(token));
    std::replace(buf.begin(), buf.end(), 'D', 'E');
    std::replace(buf.begin(), buf.end(), 'd', 'E');
    double value = 0.0;
    const auto* end = buf.data() + buf.size();
    const auto [ptr, ec] = std::from_chars(buf.data(), end, value);
    if (buf.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ParseError(line, fmt::format("malformed number '{}'", token));
    return value;
}

std::string_view field(std::string_view line, std::size_t from, std::size_t width) {
    if (from >= line.size()) return {};
    return line.substr(from, width);
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool is_delimiter(std::string_view line) { return trim(line) == "-1"; }

/// Optional "dofs=j,k provenance=name" tags in the second ID line.
void apply_tags(std::string_view id_line, frf::FrfCurve& curve) {
    for (auto tok : tokens(id_line)) {
        if (tok.starts_with("dofs=")) {
            const auto body = tok.substr(5);
            const auto comma = body.find(',');
            if (comma == std::string_view::npos) continue;
            std::size_t j = 0, k = 0;
            const auto a = body.substr(0, comma), b = body.substr(comma + 1);
            if (std::from_chars(a.data(), a.data() + a.size(), j).ec == std::errc() &&
                std::from_chars(b.data(), b.data() + b.size(), k).ec == std::errc())
                curve.dofs = {j, k};
        } else if (tok.starts_with("provenance=")) {
            try {
                curve.provenance = frf::provenance_from_string(std::string(tok.substr(11)));
            } catch (const ValidationError&) {
            }
        }
    }
}

Uff58Record read_one(Lines& lines) {
    const std::size_t type_line = lines.number();
    const auto type = trim(lines.next("dataset number"));
    if (type != "58") {
        if (type.starts_with("58")) throw ParseError(type_line, "binary dataset 58 is not supported");
        throw ParseError(type_line, fmt::format("unsupported dataset '{}'", type));
    }
    Uff58Record rec;
    rec.curve.provenance = frf::Provenance::Measured;
    std::string_view ids[5];
    for (auto& id : ids) id = lines.next("ID line");
    rec.header.description = std::string(trim(ids[0]));
    apply_tags(ids[1], rec.curve);

    const std::size_t r6 = lines.number();
    const auto card6 = lines.next("record 6");
    rec.header.function_type = static_cast<int>(parse_int(field(card6, 0, 5), r6, "function type"));
    if (rec.header.function_type != 1 && rec.header.function_type != 4)
        throw ParseError(r6, fmt::format("unsupported function type {}", rec.header.function_type));
    rec.header.response_entity = std::string(trim(field(card6, 31, 10)));
    rec.header.response_node = static_cast<int>(parse_int(field(card6, 41, 10), r6, "response node"));
    rec.header.response_direction = static_cast<int>(parse_int(field(card6, 51, 4), r6, "response direction"));
    rec.header.reference_entity = std::string(trim(field(card6, 56, 10)));
    rec.header.reference_node = static_cast<int>(parse_int(field(card6, 66, 10), r6, "reference node"));
    rec.header.reference_direction = static_cast<int>(parse_int(field(card6, 76, 4), r6, "reference direction"));

    const std::size_t r7 = lines.number();
    const auto t7 = tokens(lines.next("record 7"));
    if (t7.size() < 5) throw ParseError(r7, "malformed card: record 7 needs at least 5 fields");
    const auto ordinate_type = parse_int(t7[0], r7, "ordinate data type");
    const auto count = parse_int(t7[1], r7, "number of values");
    const auto spacing = parse_int(t7[2], r7, "abscissa spacing");
    const double x0 = parse_real(t7[3], r7);
    const double dx = parse_real(t7[4], r7);
    bool complex_data = false;
    switch (ordinate_type) {
        case 2: case 4: complex_data = false; break;
        case 5: case 6: complex_data = true; break;
        default: throw ParseError(r7, fmt::format("unsupported ordinate data type {}", ordinate_type));
    }
    rec.header.double_precision = ordinate_type == 4 || ordinate_type == 6;
    if (spacing != 1) throw ParseError(r7, "only even abscissa spacing is supported");
    if (count <= 0) throw ParseError(r7, "empty data section");
    if (x0 < 0.0) throw ParseError(r7, "negative abscissa minimum");
    if (count > 1 && !(dx > 0.0)) throw ParseError(r7, "non-monotone abscissa: increment must be positive");

    int numerator = 0;
    for (int r = 8; r <= 11; ++r) {
        const std::size_t ln = lines.number();
        const auto card = lines.next("records 8-11");
        const auto code = parse_int(field(card, 0, 10), ln, "specific data type");
        if (r == 9) numerator = static_cast<int>(code);
    }
    switch (numerator) {
        case 11: rec.curve.kind = frf::FrfKind::Mobility; break;
        case 12: rec.curve.kind = frf::FrfKind::Accelerance; break;
        default: rec.curve.kind = frf::FrfKind::Receptance; break;
    }

    const std::size_t per_value = complex_data ? 2 : 1;
    const auto n = static_cast<std::size_t>(count);
    // A data line holds at most 40 tokens; cap before allocating.
    if (n > lines.remaining() * 40 / per_value)
        throw ParseError(lines.number(), fmt::format("truncated data: {} values declared", n));
    std::vector<double> raw;
    raw.reserve(n * per_value);
    while (raw.size() < n * per_value) {
        const std::size_t ln = lines.number();
        const auto line = lines.next("data values");
        if (is_delimiter(line)) throw ParseError(ln, fmt::format("truncated data: {} of {} numbers", raw.size(), n * per_value));
        for (auto tok : tokens(line)) {
            if (raw.size() == n * per_value) throw ParseError(ln, "more data values than declared");
            raw.push_back(parse_real(tok, ln));
        }
    }
    const std::size_t end_line = lines.number();
    if (!is_delimiter(lines.next("closing -1"))) throw ParseError(end_line, "expected closing -1 delimiter");

    rec.curve.grid.resize(n);
    rec.curve.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rec.curve.grid[i] = hz_to_rad_per_s(x0 + static_cast<double>(i) * dx);
        rec.curve.values[i] = complex_data ? frf::Complex(raw[2 * i], raw[2 * i + 1]) : frf::Complex(raw[i], 0.0);
    }
    try {
        rec.curve.validate();
    } catch (const ValidationError& e) {
        throw ParseError(r7, e.what());
    }
    return rec;
}

}  // namespace

int uff_direction_code(rotor::Lateral direction) {
    switch (direction) {
        case rotor::Lateral::Y: return 2;
        case rotor::Lateral::Z: return 3;
        case rotor::Lateral::TiltY: return 6;
        case rotor::Lateral::TiltZ: return -5;
    }
    return 0;
}

Uff58Header uff_header_for(const frf::FrfCurve& curve, std::span<const rotor::DofLabel> labels) {
    Uff58Header h;
    if (curve.dofs.response < labels.size()) {
        h.response_node = labels[curve.dofs.response].node;
        h.response_direction = uff_direction_code(labels[curve.dofs.response].direction);
    }
    if (curve.dofs.reference < labels.size()) {
        h.reference_node = labels[curve.dofs.reference].node;
        h.reference_direction = uff_direction_code(labels[curve.dofs.reference].direction);
    }
    return h;
}

std::string write_uff58(const frf::FrfCurve& curve, const Uff58Header& header) {
    curve.validate();
    if (curve.size() == 0) throw ValidationError("cannot write an empty curve");
    if (header.function_type != 1 && header.function_type != 4)
        throw ValidationError(fmt::format("unsupported function type {}", header.function_type));
    const std::size_t n = curve.size();
    const double x0 = rad_per_s_to_hz(curve.grid.front());
    const double dx = n > 1 ? rad_per_s_to_hz(curve.grid.back() - curve.grid.front()) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double expected = curve.grid.front() + static_cast<double>(i) * (curve.grid.back() - curve.grid.front()) / static_cast<double>(n - 1);
        if (std::abs(curve.grid[i] - expected) > 1e-9 * curve.grid.back())
            throw ValidationError(fmt::format("grid point {} breaks even spacing; only evenly spaced abscissae are supported", i));
    }
    for (double v : {x0, dx})
        if (v != 0.0 && (std::abs(v) < 1e-90 || std::abs(v) > 1e90))
            throw ValidationError("abscissa outside the representable E16.9 range");

    std::string out;
    auto card = [&out](std::string_view line) {
        out += line;
        out += '\n';
    };
    card("    -1");
    card("    58");
    card(pad(header.description.empty() ? "whirlbench FRF" : header.description, 80));
    card(pad(fmt::format("dofs={},{} provenance={}", curve.dofs.response, curve.dofs.reference, frf::to_string(curve.provenance)), 80));
    card(pad("NONE", 80));
    card(pad("NONE", 80));
    card(pad("NONE", 80));
    card(fmt::format("{:5d}{:10d}{:5d}{:10d} {}{:10d}{:4d} {}{:10d}{:4d}", header.function_type, 1, 0, 0,
                     pad(header.response_entity, 10), header.response_node, header.response_direction,
                     pad(header.reference_entity, 10), header.reference_node, header.reference_direction));
    const int ordinate_type = header.double_precision ? 6 : 5;
    card(fmt::format("{:10d}{:10d}{:10d}{:16.9E}{:16.9E}{:16.9E}", ordinate_type, n, 1, x0, dx, 0.0));
    card(fmt::format("{:10d}{:5d}{:5d}{:5d} {} {}", kAbscissaFrequency, 0, 0, 0, pad("Frequency", 20), pad("Hz", 20)));
    card(fmt::format("{:10d}{:5d}{:5d}{:5d} {} {}", ordinate_code(curve.kind), 0, 0, 0, pad(frf::to_string(curve.kind), 20),
                     pad("NONE", 20)));
    card(fmt::format("{:10d}{:5d}{:5d}{:5d} {} {}", kForce, 0, 0, 0, pad("Force", 20), pad("N", 20)));
    card(fmt::format("{:10d}{:5d}{:5d}{:5d} {} {}", 0, 0, 0, 0, pad("NONE", 20), pad("NONE", 20)));

    const std::size_t per_line = header.double_precision ? 4 : 6;
    std::string line;
    std::size_t on_line = 0;
    auto emit = [&](double v) {
        line += header.double_precision ? fmt::format("{:20.12E}", v) : fmt::format("{:13.5E}", v);
        if (++on_line == per_line) {
            card(line);
            line.clear();
            on_line = 0;
        }
    };
    for (const auto& v : curve.values) {
        emit(v.real());
        emit(v.imag());
    }
    if (on_line > 0) card(line);
    card("    -1");
    return out;
}

std::vector<Uff58Record> read_uff58(std::string_view text) {
    Lines lines(text);
    std::vector<Uff58Record> records;
    while (!lines.done()) {
        const std::size_t ln = lines.number();
        const auto line = lines.next("-1 delimiter");
        if (trim(line).empty()) continue;
        if (!is_delimiter(line)) throw ParseError(ln, "expected -1 delimiter");
        records.push_back(read_one(lines));
    }
    if (records.empty()) throw ParseError(1, "no dataset 58 records found");
    return records;
}

}  // namespace whirlbench::io
