#pragma once

// Small tokenizing helpers shared by the text formats.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace heatsym::detail {

std::string_view trim(std::string_view s);
std::string lower(std::string_view s);

double parse_number(std::string_view tok);
std::uint64_t parse_unsigned(std::string_view tok);

// "name(a, b, c)" -> {"name", {"a", "b", "c"}}; a bare "name" has no arguments.
// The name is lower-cased.
struct Call {
  std::string name;
  std::vector<std::string_view> args;
};
Call split_call(std::string_view text);

}  // namespace heatsym::detail
