#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ponwm::csv {

// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(std::string_view line);

// Strict full-string parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

// Fixed-point rendering used by every report writer, so outputs are byte-stable.
std::string number(double value, int decimals = 6);

}  // namespace ponwm::csv
