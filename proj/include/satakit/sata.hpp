#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satakit/onion.hpp"

namespace satakit {

enum class SataForm { Subdomain, QueryString };

std::string_view sata_form_name(SataForm form) noexcept;

inline constexpr std::string_view kSataQueryParam = "onion";
inline constexpr std::string_view kSubdomainMarker = "onion";
inline constexpr std::size_t kSubdomainLabelLength = kOnionLabelLength + 5;
inline constexpr std::string_view kSecureDropSuffix = ".securedrop.tor.onion";

/// A registered domain bound to an onion identity. Two Satas name the same
/// site when domain and onion agree; `form` only records how it was written.
struct Sata {
  std::string domain;
  OnionAddress onion;
  SataForm form = SataForm::QueryString;

  bool same_identity(const Sata& other) const noexcept {
    return domain == other.domain && onion == other.onion;
  }
};

/// Validates and lowercases the domain. Throws Error{InvalidDomain} when
/// the domain is malformed or too long to carry the subdomain form.
Sata make_sata(std::string_view domain, const OnionAddress& onion,
               SataForm form = SataForm::QueryString);

/// Accepts an absolute URL or a bare hostname.
///
/// Throws Error{NotASata} when no onion component is present, and
/// Error{InvalidOnionComponent} when one is present but fails validation or
/// when subdomain and query components disagree.
Sata parse_sata(std::string_view url_or_host);

/// "<label>onion.<domain>" (host only).
std::string to_subdomain_form(const Sata& s);
/// "https://<domain>/?onion=<label>"
std::string to_query_form(const Sata& s);
/// Rendering in the Sata's own form; subdomain form as an https URL.
std::string to_url(const Sata& s);

/// In order: subdomain-form FQDN, base domain, "<label>.onion".
std::vector<std::string> expected_sans(const Sata& s);

struct SecureDropTarget {
  std::string base_domain;
  std::optional<OnionAddress> onion;
};

/// Strips ".securedrop.tor.onion". When `onion_param` is given it must be a
/// valid onion label (else InvalidOnionComponent). Throws
/// Error{NotSecureDropName} when the suffix is absent.
SecureDropTarget securedrop_rewrite(std::string_view hostname,
                                    std::optional<std::string_view> onion_param);

bool is_securedrop_name(std::string_view hostname) noexcept;

}  // namespace satakit
