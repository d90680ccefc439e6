#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "whirlbench/frf.hpp"
#include "whirlbench/rotor.hpp"

namespace whirlbench::io {

/// Subset of universal file dataset 58: function types 1 and 4, real or complex
/// ordinates in single or double precision, even abscissa spacing in Hz.
struct Uff58Header {
    std::string description;
    int function_type = 4;
    std::string response_entity = "NONE";
    int response_node = 1;
    int response_direction = 0;
    std::string reference_entity = "NONE";
    int reference_node = 1;
    int reference_direction = 0;
    bool double_precision = true;
};

struct Uff58Record {
    frf::FrfCurve curve;
    Uff58Header header;
};

/// Direction codes: +Y 2, +Z 3, TiltY (rotation about +Z) 6, TiltZ (rotation
/// about -Y) -5.
int uff_direction_code(rotor::Lateral direction);

/// Header whose node/direction fields come from the curve's DOF labels.
Uff58Header uff_header_for(const frf::FrfCurve& curve, std::span<const rotor::DofLabel> labels);

/// One record, 80-column card images between -1 delimiters. The grid must be
/// evenly spaced.
std::string write_uff58(const frf::FrfCurve& curve, const Uff58Header& header);

/// Every dataset-58 record in the text. Malformed input raises ParseError with
/// the offending line.
std::vector<Uff58Record> read_uff58(std::string_view text);

}  // namespace whirlbench::io
