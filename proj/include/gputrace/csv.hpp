#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gputrace {

// Splits one CSV line, honoring double-quoted fields with "" escapes.
std::vector<std::string> csv_split(std::string_view line);

// Quotes a field when it contains a comma, quote, or newline.
std::string csv_quote(std::string_view field);

std::string csv_join(const std::vector<std::string>& fields);

}  // namespace gputrace
