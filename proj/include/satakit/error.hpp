#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace satakit {

/// Every failure class the library can report. Names are stable and appear
/// verbatim in CLI `--json` output.
enum class Errc {
  BadLength,
  BadAlphabet,
  BadVersion,
  BadChecksum,
  MalformedSignature,
  MalformedKey,
  NotASata,
  InvalidOnionComponent,
  InvalidDomain,
  NotSecureDropName,
  UnrepresentableField,
  KeyMismatch,
  BadSignature,
  StructuralViolation,
  TooLarge,
  NoFingerprints,
  Stale,
  OutOfRange,
  DomainMismatch,
  EmptyInput,
  UnknownHost,
  BadFixture,
  ParseError,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;
std::optional<Errc> errc_from_name(std::string_view name) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail,
        std::optional<std::size_t> position = std::nullopt);

  Errc code() const noexcept { return code_; }
  /// Character offset into the offending input, when one applies.
  std::optional<std::size_t> position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::optional<std::size_t> position_;
  std::string detail_;
};

/// Result of a check-style operation: success, or the failing class plus a
/// reason naming the violated rule.
class Status {
 public:
  Status() = default;
  static Status ok() { return Status{}; }
  static Status fail(Errc code, std::string detail) {
    Status s;
    s.code_ = code;
    s.detail_ = std::move(detail);
    return s;
  }

  bool is_ok() const noexcept { return !code_.has_value(); }
  explicit operator bool() const noexcept { return is_ok(); }
  std::optional<Errc> code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::optional<Errc> code_;
  std::string detail_;
};

}  // namespace satakit
