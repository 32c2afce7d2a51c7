#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace satakit {

/// Calendar date (UTC), stored as days since 1970-01-01. Wire form is always
/// "YYYY-MM-DD".
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days d) : days_(d) {}

  /// Throws Error{ParseError} for anything other than a valid "YYYY-MM-DD".
  static Date parse(std::string_view iso);
  static Date from_ymd(int year, unsigned month, unsigned day);
  /// System clock; only the CLI calls this, library operations take dates
  /// explicitly.
  static Date today();

  std::string to_string() const;
  std::chrono::sys_days sys_days() const noexcept { return days_; }
  long long days_since_epoch() const noexcept {
    return days_.time_since_epoch().count();
  }

  Date plus_days(long long n) const noexcept {
    return Date{days_ + std::chrono::days{n}};
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Signed number of days from `from` to `to`.
inline long long days_between(const Date& from, const Date& to) noexcept {
  return to.days_since_epoch() - from.days_since_epoch();
}

}  // namespace satakit
