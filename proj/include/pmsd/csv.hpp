#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pmsd::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: comma separator, double-quote quoting, LF or CRLF line
/// ends, leading UTF-8 BOM ignored. Blank lines are dropped.
std::vector<Row> parse(std::string_view text);

/// Quotes the field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const Row& row);

}  // namespace pmsd::csv
