#include "satakit/error.hpp"

#include <array>
#include <utility>

namespace satakit {
namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 24> kNames{{
    {Errc::BadLength, "BadLength"},
    {Errc::BadAlphabet, "BadAlphabet"},
    {Errc::BadVersion, "BadVersion"},
    {Errc::BadChecksum, "BadChecksum"},
    {Errc::MalformedSignature, "MalformedSignature"},
    {Errc::MalformedKey, "MalformedKey"},
    {Errc::NotASata, "NotASata"},
    {Errc::InvalidOnionComponent, "InvalidOnionComponent"},
    {Errc::InvalidDomain, "InvalidDomain"},
    {Errc::NotSecureDropName, "NotSecureDropName"},
    {Errc::UnrepresentableField, "UnrepresentableField"},
    {Errc::KeyMismatch, "KeyMismatch"},
    {Errc::BadSignature, "BadSignature"},
    {Errc::StructuralViolation, "StructuralViolation"},
    {Errc::TooLarge, "TooLarge"},
    {Errc::NoFingerprints, "NoFingerprints"},
    {Errc::Stale, "Stale"},
    {Errc::OutOfRange, "OutOfRange"},
    {Errc::DomainMismatch, "DomainMismatch"},
    {Errc::EmptyInput, "EmptyInput"},
    {Errc::UnknownHost, "UnknownHost"},
    {Errc::BadFixture, "BadFixture"},
    {Errc::ParseError, "ParseError"},
    {Errc::IoError, "IoError"},
}};

std::string compose(Errc code, const std::string& detail,
                    std::optional<std::size_t> position) {
  std::string msg{errc_name(code)};
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  if (position) {
    msg += " (at position " + std::to_string(*position) + ")";
  }
  return msg;
}

}  // namespace

std::string_view errc_name(Errc code) noexcept {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

std::optional<Errc> errc_from_name(std::string_view name) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

Error::Error(Errc code, const std::string& detail,
             std::optional<std::size_t> position)
    : std::runtime_error(compose(code, detail, position)),
      code_(code),
      position_(position),
      detail_(detail) {}

}  // namespace satakit
