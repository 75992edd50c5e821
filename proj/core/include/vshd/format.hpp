#pragma once

#include <string>
#include <string_view>

namespace vshd::io {

/// Shortest decimal text that parses back to the same double; `.` separator,
/// independent of the global locale.
std::string format_number(double value);

/// Fixed notation with `decimals` digits after the point, locale independent.
std::string format_fixed(double value, int decimals);

/// Strict full-string parse; returns false on any trailing garbage.
bool parse_number(std::string_view text, double& out);

}  // namespace vshd::io
