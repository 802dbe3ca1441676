#include "text.hpp"

#include <cctype>
#include <charconv>

#include "heatsym/errors.hpp"

namespace heatsym::detail {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

double parse_number(std::string_view tok) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError("invalid number '" + std::string(tok) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view tok) {
  tok = trim(tok);
  std::uint64_t v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError("invalid integer '" + std::string(tok) + "'");
  }
  return v;
}

Call split_call(std::string_view text) {
  text = trim(text);
  Call call;
  const auto open = text.find('(');
  call.name = lower(trim(text.substr(0, open)));
  if (open == std::string_view::npos) return call;
  if (text.back() != ')') throw ParseError("missing ')' in '" + std::string(text) + "'");
  std::string_view inner = text.substr(open + 1, text.size() - open - 2);
  if (trim(inner).empty()) return call;
  std::size_t start = 0;
  while (true) {
    const auto comma = inner.find(',', start);
    call.args.push_back(inner.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return call;
}

}  // namespace heatsym::detail
