#include "satakit/date.hpp"

#include <charconv>
#include <cstdio>

#include "satakit/error.hpp"

namespace satakit {
namespace {

bool parse_digits(std::string_view s, int& out) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date Date::parse(std::string_view iso) {
  int y = 0, m = 0, d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      !parse_digits(iso.substr(0, 4), y) || !parse_digits(iso.substr(5, 2), m) ||
      !parse_digits(iso.substr(8, 2), d)) {
    throw Error(Errc::ParseError,
                "expected date as YYYY-MM-DD, got '" + std::string(iso) + "'");
  }
  return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) {
    throw Error(Errc::ParseError, "no such calendar date");
  }
  return Date{std::chrono::sys_days{ymd}};
}

Date Date::today() {
  return Date{std::chrono::floor<std::chrono::days>(
      std::chrono::system_clock::now())};
}

std::string Date::to_string() const {
  std::chrono::year_month_day ymd{days_};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace satakit
