#include "tsn/time.hpp"

#include <charconv>
#include <limits>

#include "tsn/errors.hpp"

namespace tsn {

TimeNs parse_duration(std::string_view text) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin) {
    throw ParseError("invalid duration '" + std::string(text) + "'");
  }
  std::string_view unit(ptr, static_cast<std::size_t>(end - ptr));
  std::int64_t scale = 1;
  if (unit.empty() || unit == "ns") {
    scale = 1;
  } else if (unit == "us") {
    scale = 1'000;
  } else if (unit == "ms") {
    scale = 1'000'000;
  } else if (unit == "s") {
    scale = 1'000'000'000;
  } else {
    throw ParseError("unknown duration unit '" + std::string(unit) + "'");
  }
  if (value > std::numeric_limits<std::int64_t>::max() / scale ||
      value < std::numeric_limits<std::int64_t>::min() / scale) {
    throw ParseError("duration out of range '" + std::string(text) + "'");
  }
  return TimeNs{value * scale};
}

std::string format_duration(TimeNs t) {
  const std::int64_t v = t.count();
  if (v != 0 && v % 1'000'000'000 == 0) return std::to_string(v / 1'000'000'000) + "s";
  if (v != 0 && v % 1'000'000 == 0) return std::to_string(v / 1'000'000) + "ms";
  if (v != 0 && v % 1'000 == 0) return std::to_string(v / 1'000) + "us";
  return std::to_string(v) + "ns";
}

TimeNs ceil_to(TimeNs t, TimeNs quantum) {
  const std::int64_t q = quantum.count();
  std::int64_t v = t.count();
  std::int64_t r = v % q;
  if (r < 0) r += q;
  return r == 0 ? t : TimeNs{v - r + q};
}

}  // namespace tsn
