#pragma once

#include <string>
#include <string_view>

namespace feedrank {

// 17 significant digits; parse_double(format_double(x)) == x.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace feedrank
