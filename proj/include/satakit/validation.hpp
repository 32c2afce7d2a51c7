#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "satakit/bytes.hpp"
#include "satakit/credential.hpp"
#include "satakit/date.hpp"
#include "satakit/sata.hpp"
#include "satakit/trust.hpp"

namespace satakit {

/// What the validator needs to know about a served TLS certificate.
struct CertDescriptor {
  Bytes der;
  std::string fingerprint;  ///< uppercase hex SHA-256 of `der`
  std::vector<std::string> san_list;
  Date not_before;
  Date not_after;
  bool has_sct = false;

  bool covers(std::string_view name) const;
};

/// SHA-256 of the bytes, uppercase hex. Throws Error{EmptyInput}.
std::string fingerprint_cert(ByteView der);

/// Descriptor over opaque certificate bytes with an explicit SAN list.
CertDescriptor make_cert_descriptor(Bytes der, std::vector<std::string> san_list,
                                    Date not_before, Date not_after, bool has_sct = false);

/// Reads an X.509 certificate (PEM or DER): fingerprint over DER, DNS SANs,
/// validity window, and whether an embedded SCT list is present.
/// Throws Error{ParseError}.
CertDescriptor parse_x509(ByteView pem_or_der);
CertDescriptor load_certificate(const std::string& path);

enum class VerdictCode {
  Accept,
  RejectSignature,
  RejectStale,
  RejectFingerprint,
  RejectSanMissing,
  RejectNotSata,
  RejectCertValidity,
  RejectTargetMismatch,
};

std::string_view verdict_name(VerdictCode code) noexcept;

struct Verdict {
  VerdictCode outcome = VerdictCode::RejectSignature;
  std::string detail;

  bool accepted() const noexcept { return outcome == VerdictCode::Accept; }
};

/// Browser-side checks for a connection to SATA `s`, in fixed order:
///   0. cert SANs hold the subdomain form or the .onion name, plus the base
///      domain; cert validity window contains `now`
///   1. header is a valid credential from `s` itself (signature under the
///      onion key carried by `s`)
///   2. header binding is fresh at `now`
///   3. one of the header's fingerprints equals the cert fingerprint
/// Returns the first failure, else Accept.
Verdict validate_connection(const Sata& s, const CertDescriptor& cert,
                            const Sattestation& header, Date now);

using Origin = std::variant<Sata, std::string>;

/// Accept only when `redirect_target` is a SATA for the origin's registered
/// domain (and the origin's onion, when the origin is itself a SATA) whose
/// expected SANs are covered by `origin_cert`.
Verdict validate_onion_location(const Origin& origin, std::string_view redirect_target,
                                const CertDescriptor& origin_cert);

enum class AltSvcDecision { Allow, Block };

std::string_view alt_svc_decision_name(AltSvcDecision d) noexcept;

struct AltSvcResult {
  AltSvcDecision decision = AltSvcDecision::Block;
  std::string reason;
};

/// Allow iff `self_satt` is a valid, fresh self-sattestation binding
/// origin.domain to the alt onion, and either that onion is the origin's own
/// or `policy` yields a trusted chain for (origin.domain, alt onion) on one
/// of its required labels. Everything else blocks.
AltSvcResult validate_alt_svc(const Sata& origin, std::string_view alt_host,
                              const Sattestation* self_satt, const TrustPolicy* policy,
                              std::span<const Sattestation> third_party, Date now);

}  // namespace satakit
