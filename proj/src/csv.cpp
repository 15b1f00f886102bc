#include "learnorder/csv.hpp"

#include "learnorder/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace learnorder::csv {

namespace {

// Splits one logical record; may consume further physical lines when a
// quoted field spans a line break.
bool read_record(std::istream& in, Row& out, std::size_t& line_no, std::string_view source) {
    out.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    ++line_no;
    const std::size_t start_line = line_no;

    std::string cell;
    bool in_quotes = false;
    bool was_quoted = false;
    for (;;) {
        if (!line.empty() && line.back() == '\r' && !in_quotes) line.pop_back();
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        cell.push_back('"');
                        ++i;
                    } else {
                        in_quotes = false;
                    }
                } else {
                    cell.push_back(c);
                }
            } else if (c == '"') {
                if (!cell.empty() || was_quoted) {
                    throw Error(ErrorCode::MalformedCSV,
                                fmt::format("{}:{}: stray quote inside unquoted field",
                                            source, line_no));
                }
                in_quotes = true;
                was_quoted = true;
            } else if (c == ',') {
                out.push_back(std::move(cell));
                cell.clear();
                was_quoted = false;
            } else {
                if (was_quoted) {
                    throw Error(ErrorCode::MalformedCSV,
                                fmt::format("{}:{}: characters after closing quote", source,
                                            line_no));
                }
                cell.push_back(c);
            }
        }
        if (!in_quotes) break;
        cell.push_back('\n');
        if (!std::getline(in, line)) {
            throw Error(ErrorCode::MalformedCSV,
                        fmt::format("{}:{}: unterminated quoted field", source, start_line));
        }
        ++line_no;
    }
    out.push_back(std::move(cell));
    return true;
}

bool is_blank(const Row& row) {
    return row.size() == 1 && row.front().empty();
}

} // namespace

Document read(std::istream& in, std::string_view source) {
    Document doc;
    std::size_t line_no = 0;
    Row row;
    bool have_header = false;
    while (true) {
        const std::size_t before = line_no;
        if (!read_record(in, row, line_no, source)) break;
        if (is_blank(row)) continue;
        if (!have_header) {
            doc.header = row;
            have_header = true;
            continue;
        }
        if (row.size() != doc.header.size()) {
            throw Error(ErrorCode::MalformedCSV,
                        fmt::format("{}:{}: expected {} cells, found {}", source, before + 1,
                                    doc.header.size(), row.size()));
        }
        doc.rows.push_back(row);
        doc.line_numbers.push_back(before + 1);
    }
    if (!have_header) {
        throw Error(ErrorCode::MalformedCSV, fmt::format("{}: missing header row", source));
    }
    return doc;
}

std::string escape(std::string_view cell) {
    if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << escape(row[i]);
    }
    out << '\n';
}

std::string format_real(double value) {
    if (value == 0.0) return "0"; // folds -0
    return fmt::format("{:.9g}", value);
}

std::string format_optional(const std::optional<double>& value) {
    return value ? format_real(*value) : std::string();
}

std::optional<double> parse_real(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

} // namespace learnorder::csv
