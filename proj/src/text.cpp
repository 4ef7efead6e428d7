#include "hrcl/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

#include "hrcl/error.hpp"

namespace hrcl::text {

std::string format_double(double value) {
    if (value == 0.0) value = 0.0;  // fold -0 into 0
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
        throw PreconditionError("not a number: '" + std::string(token) + "'");
    if (!std::isfinite(value)) throw PreconditionError("non-finite number: '" + std::string(token) + "'");
    return value;
}

long long parse_int(std::string_view token) {
    token = trim(token);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
        throw PreconditionError("not an integer: '" + std::string(token) + "'");
    return value;
}

std::uint64_t parse_uint(std::string_view token) {
    token = trim(token);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
        throw PreconditionError("not an unsigned integer: '" + std::string(token) + "'");
    return value;
}

bool parse_bool(std::string_view token) {
    token = trim(token);
    if (token == "1" || token == "true" || token == "on" || token == "yes") return true;
    if (token == "0" || token == "false" || token == "off" || token == "no") return false;
    throw PreconditionError("not a boolean: '" + std::string(token) + "'");
}

std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) noexcept {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

}  // namespace hrcl::text
