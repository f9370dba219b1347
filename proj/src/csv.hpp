#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ironylab::csv {

using Row = std::vector<std::string>;

// RFC 4180 style reader: quoted fields may hold delimiters, doubled quotes
// and line breaks. With `quoting` off (TSV dumps), quotes are plain text.
// A leading UTF-8 BOM is dropped. Blank lines are skipped.
std::vector<Row> parse(std::string_view data, char delimiter, bool quoting = true);

}  // namespace ironylab::csv
