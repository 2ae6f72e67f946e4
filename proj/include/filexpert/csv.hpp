#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace filexpert::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: quoted fields may contain commas, quotes ("") and line
// breaks. A trailing CR before LF is dropped. Empty trailing lines are skipped.
std::vector<Row> parse(std::istream& in);
std::vector<Row> parse(std::string_view text);
std::vector<Row> read_file(const std::string& path);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

} // namespace filexpert::csv
