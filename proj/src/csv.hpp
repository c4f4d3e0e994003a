#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtz::csv {

using Record = std::vector<std::string>;

/// Reads one RFC-4180 record (quoted fields, doubled quotes, embedded line
/// breaks, CRLF or LF endings). Returns nullopt at end of input.
std::optional<Record> read_record(std::istream& in);

/// Quotes a field when it contains a separator, quote or line break.
std::string escape(std::string_view field);

std::string_view trim(std::string_view text);

/// Parses a complete finite-or-not decimal number (scientific notation ok).
std::optional<double> parse_number(std::string_view text);

/// Shortest text that parses back to exactly `value`.
std::string format_roundtrip(double value);

}  // namespace dtz::csv
