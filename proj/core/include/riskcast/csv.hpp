#pragma once

#include <string>
#include <vector>

namespace riskcast::csv {

/// Splits one delimited line; no quoting rules, the formats here never need them.
std::vector<std::string> split(const std::string& line, char delimiter);

/// Reads all non-empty lines of a text file; throws IoError if unreadable.
std::vector<std::string> read_lines(const std::string& path);

/// Parses a decimal field; throws FormatError naming `context` on failure.
double parse_double(const std::string& field, const std::string& context);

/// Shortest round-trip-safe representation used by every emitted file.
std::string format_double(double value);

/// Writes lines joined by '\n' (with trailing newline); throws IoError on failure.
void write_lines(const std::string& path, const std::vector<std::string>& lines);

} // namespace riskcast::csv
