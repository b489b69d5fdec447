#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace k2rag::csv {

/// RFC 4180 quoting: wraps in quotes when the field holds a comma, quote,
/// or line break; embedded quotes are doubled.
std::string quote_field(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Parses a whole CSV document (handles quoted fields spanning lines).
/// Throws Error(io) with a row number on malformed input.
std::vector<std::vector<std::string>> parse_file(const std::filesystem::path& path);
std::vector<std::vector<std::string>> parse_text(const std::string& text,
                                                 const std::string& origin = "<string>");

} // namespace k2rag::csv
