#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairbench::text {

std::string_view trim(std::string_view s) noexcept;

/// Finite decimal number (optional sign, fraction, exponent); surrounding
/// blanks are ignored. Anything else yields nullopt.
std::optional<double> parse_number(std::string_view s) noexcept;

std::vector<std::string> split(std::string_view s, char sep);

/// Fixed notation with 6 fractional digits; negative zero prints as 0.000000.
std::string fixed6(double v);

/// Shortest decimal text that parses back to exactly `v`.
std::string shortest(double v);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace fairbench::text
