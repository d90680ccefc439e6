#include "whirlbench/io/format.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "whirlbench/error.hpp"

namespace whirlbench::io {

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0
    return fmt::format("{:.9g}", value);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace whirlbench::io
