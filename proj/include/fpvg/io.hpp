#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace fpvg::io {

// Whole-file read; throws IoError.
std::string read_file(const std::string& path);

// Writes via a sibling temp file and rename so readers never observe a
// partially written output. Throws IoError.
void write_file_atomic(const std::string& path, std::string_view content);

// Calls fn(line_number, line) for every non-blank line; numbering is 1-based
// and counts blank lines. A trailing '\r' is stripped.
void for_each_line(std::string_view text,
                   const std::function<void(std::size_t, std::string_view)>& fn);

// "%.12g" rendering used by every report output.
std::string format_decimal(double value);
// Double rounded to the 12 significant digits shown by format_decimal.
double round_decimal(double value);

}  // namespace fpvg::io
