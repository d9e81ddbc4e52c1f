#pragma once

// Minimal delimited-text reader shared by the ingest and fixture code.

#include <string>
#include <string_view>
#include <vector>

namespace cantons::detail {

struct CsvRecord {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

/// Splits text into records. Supports double-quoted fields with `""`
/// escapes, CRLF line ends, and skips blank lines. A leading UTF-8 BOM is
/// ignored. Throws ParseError on an unterminated quote.
std::vector<CsvRecord> read_csv(std::string_view text, char delimiter = ',');

/// Quotes a field when it contains the delimiter, a quote or a newline.
std::string csv_escape(std::string_view field, char delimiter = ',');

std::string trim(std::string_view s);

}  // namespace cantons::detail
