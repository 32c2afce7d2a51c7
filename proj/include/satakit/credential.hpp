#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satakit/bytes.hpp"
#include "satakit/date.hpp"
#include "satakit/error.hpp"
#include "satakit/onion.hpp"
#include "satakit/sata.hpp"

namespace satakit {

inline constexpr int kSattestationVersion = 1;
/// Upper bound (exclusive) on a self-sattestation's transport encoding.
inline constexpr std::size_t kSelfSattestationMaxBytes = 800;
inline constexpr std::string_view kSataHeaderName = "x-sata";
inline constexpr std::string_view kWellKnownSattestationPath = "/.well-known/sattestation";
inline constexpr std::string_view kCredentialFileExtension = ".satt";

/// One (D, O[, L][, C]) tuple inside a sattestation.
struct Binding {
  std::string domain;
  OnionAddress onion;
  std::vector<std::string> labels;
  /// Uppercase hex SHA-256 of DER certificates; self-sattestations only.
  std::vector<std::string> cert_fingerprints;
  Date issued;
  Date refreshed_on;
  std::optional<bool> onion_reachable;

  Sata identity() const { return Sata{domain, onion, SataForm::QueryString}; }
  bool has_label(std::string_view label) const;
};

struct SattestationBody {
  int version = kSattestationVersion;
  std::string sattestor_domain;
  OnionAddress sattestor_onion;
  double refresh_rate_days = 7.0;
  std::vector<Binding> sattestees;

  Sata sattestor() const {
    return Sata{sattestor_domain, sattestor_onion, SataForm::QueryString};
  }
  /// Exactly one binding, and it names the sattestor itself.
  bool is_self_form() const;
};

struct Sattestation {
  SattestationBody body;
  Signature signature{};

  bool is_self_sattestation() const { return body.is_self_form(); }
};

/// "7 days", "3.5 days". Throws Error{UnrepresentableField} for a
/// non-positive or non-finite rate.
std::string format_refresh_rate(double days);
/// Throws Error{ParseError}.
double parse_refresh_rate(std::string_view text);

/// Compact JSON with fixed key order:
/// {"sattestation":{"sattestation_version","sattestor_domain",
///  "sattestor_onion","sattestor_refresh_rate","sattestees":[{"domain",
///  "onion","labels"?,"cert_fingerprint"?,"issued","refreshed_on",
///  "onion_reachable"?}]}}
/// Optional members are omitted when empty/unset.
Bytes canonical_bytes(const SattestationBody& body);

/// Canonical body with "signature" (lowercase hex) appended; one line.
std::string to_transport(const Sattestation& s);
std::size_t transport_size(const Sattestation& s);

/// Parses the transport form. Member order in the input is not significant.
/// Throws Error{ParseError} or Error{UnrepresentableField}.
Sattestation parse_sattestation(std::string_view json);
/// Body without a signature ({"sattestation":{...}}).
SattestationBody parse_body(std::string_view json);

/// JSON array of transport-form credentials, as served at the well-known path.
std::string to_wellknown(std::span<const Sattestation> list);
std::vector<Sattestation> parse_wellknown(std::string_view json);

/// Structural rules only (no signature): version, domains, dates, labels,
/// fingerprints and the self-sattestation shape.
Status check_structure(const SattestationBody& body);

/// Signs canonical_bytes(body). Throws Error{KeyMismatch} when the key is
/// not the sattestor's onion key, Error{StructuralViolation} for a body that
/// fails check_structure.
Sattestation issue(const KeyPair& sattestor_key, SattestationBody body);

/// Structure, then the signature under the sattestor_onion key.
Status verify_credential(const Sattestation& s);

/// Single-binding credential for the key's own SATA. Throws
/// Error{NoFingerprints}, or Error{TooLarge} when the transport form is
/// 800 bytes or more.
Sattestation make_self_sattestation(const KeyPair& key, std::string_view domain,
                                    std::vector<std::string> cert_fingerprints,
                                    std::vector<std::string> labels, Date issued,
                                    Date refreshed_on, double refresh_rate_days);

struct Freshness {
  bool fresh = false;
  Date reference;
  long long age_days = 0;
  double refresh_rate_days = 0;

  /// Days past the refresh window; zero or negative when fresh.
  double margin_days() const { return static_cast<double>(age_days) - refresh_rate_days; }
  Status status() const;
};

/// fresh iff |now - refreshed_on| < refresh rate (strict). Throws
/// Error{OutOfRange} for a bad binding index.
Freshness check_freshness(const Sattestation& s, std::size_t binding_index, Date now);

/// Rotation-pointer labels are "sattestor({...})".
bool is_rotation_pointer_label(std::string_view label) noexcept;

}  // namespace satakit
