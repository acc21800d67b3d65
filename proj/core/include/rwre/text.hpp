#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rwre {

// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

// Whitespace-separated tokens.
std::vector<std::string> split_words(std::string_view text);

std::string_view trim(std::string_view text);

// Strict parsers: the whole token must be consumed. `what` names the
// offending key in the error message.
double parse_real(std::string_view token, std::string_view what);
long long parse_integer(std::string_view token, std::string_view what);

}  // namespace rwre
