#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace whirlbench::io {

/// Fixed 9-significant-digit rendering used by every text writer.
std::string format_number(double value);

/// Whole-file helpers; failures raise IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace whirlbench::io
