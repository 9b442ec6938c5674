#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace suitegauge::csv {

struct Row {
    std::size_t line = 0;  // 1-based physical line where the record starts
    std::vector<std::string> fields;
};

// RFC 4180 style reader: comma separated, double-quote quoting with "" escapes,
// CRLF or LF line endings, optional UTF-8 BOM. Blank lines are skipped.
// Throws ParseError (naming `source`) on unterminated quotes or stray quote
// characters inside unquoted fields.
std::vector<Row> parse(std::istream& in, const std::string& source);
std::vector<Row> read_file(const std::string& path);

std::string escape(std::string_view field);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Writes one CSV record terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace suitegauge::csv
