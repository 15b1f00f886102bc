#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace learnorder::csv {

using Row = std::vector<std::string>;

struct Document {
    Row header;
    std::vector<Row> rows;
    std::vector<std::size_t> line_numbers; // 1-based source line of each row
};

// Reads a whole CSV stream. Quoted fields with embedded commas, doubled
// quotes and CR/LF line endings are accepted. Every row must have exactly
// as many cells as the header; blank lines are skipped.
// Throws Error(MalformedCSV).
Document read(std::istream& in, std::string_view source = "<csv>");

// Quotes a cell only when it contains a separator, quote or line break.
std::string escape(std::string_view cell);

void write_row(std::ostream& out, const Row& row);

// 9 significant digits, shortest of fixed/scientific ("%.9g").
std::string format_real(double value);

std::string format_optional(const std::optional<double>& value);

// Strict full-string parse; rejects trailing characters and non-finite values.
std::optional<double> parse_real(std::string_view text);

} // namespace learnorder::csv
