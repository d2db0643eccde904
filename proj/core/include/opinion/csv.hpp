#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace opinion {

// RFC 4180 quoting when the field holds a comma, quote or line break.
std::string csv_field(std::string_view s);

// Splits one CSV record (no embedded line breaks) honouring double quotes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace opinion
