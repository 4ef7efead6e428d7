#pragma once

// Small text helpers shared by the file formats. Doubles are written in the
// shortest form that round-trips exactly, so every emitted file is byte-stable.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hrcl::text {

std::string format_double(double value);
double parse_double(std::string_view token);
long long parse_int(std::string_view token);
std::uint64_t parse_uint(std::string_view token);
bool parse_bool(std::string_view token);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t value);

}  // namespace hrcl::text
