// Number <-> text helpers shared by the CSV, JSON, and config writers.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qfc {

// %.12g, the fixed report precision.
std::string fmt12(double v);

// Shortest of %.12g / %.17g that parses back to the same double; used where
// a file must round-trip exactly (config defaults).
std::string fmt_roundtrip(double v);

std::string fmt_u64(std::uint64_t v);
std::string fmt_i64(std::int64_t v);

// Strict full-string parses; nullopt on any trailing garbage.
std::optional<double> parse_double(const std::string& s);
std::optional<std::int64_t> parse_i64(const std::string& s);
std::optional<std::uint64_t> parse_u64(const std::string& s);

std::string trim(const std::string& s);

} // namespace qfc
