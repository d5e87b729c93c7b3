#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iotnames::csv {

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

/// Splits one CSV record; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_record(std::string_view line);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace iotnames::csv
