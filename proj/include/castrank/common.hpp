#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace castrank {

/// Selects the serial reference kernels or the OpenMP ones. Both must
/// produce identical results; the serial path exists for testing and
/// benchmarking.
enum class Exec { serial, parallel };

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

/// Strict decimal parse of the whole string; throws Error(InvalidArgument).
double parse_real(std::string_view text);
std::int64_t parse_int(std::string_view text);

/// Writes `contents` to `path`, throwing Error(IoError) on failure.
void write_text_file(const std::string& path, std::string_view contents);
std::string read_text_file(const std::string& path);

}  // namespace castrank
