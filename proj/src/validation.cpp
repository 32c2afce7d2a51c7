#include "satakit/validation.hpp"

#include <algorithm>
#include <cctype>

#include "satakit/digest.hpp"
#include "satakit/error.hpp"

namespace satakit {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

Verdict reject(VerdictCode code, std::string detail) { return {code, std::move(detail)}; }

}  // namespace

bool CertDescriptor::covers(std::string_view name) const {
  const std::string want = lower(name);
  return std::any_of(san_list.begin(), san_list.end(),
                     [&](const std::string& san) { return lower(san) == want; });
}

std::string fingerprint_cert(ByteView der) {
  if (der.empty()) throw Error(Errc::EmptyInput, "certificate bytes are empty");
  return to_hex(sha256(der), HexCase::Upper);
}

CertDescriptor make_cert_descriptor(Bytes der, std::vector<std::string> san_list,
                                    Date not_before, Date not_after, bool has_sct) {
  CertDescriptor c;
  c.fingerprint = fingerprint_cert(der);
  c.der = std::move(der);
  c.san_list = std::move(san_list);
  c.not_before = not_before;
  c.not_after = not_after;
  c.has_sct = has_sct;
  return c;
}

std::string_view verdict_name(VerdictCode code) noexcept {
  switch (code) {
    case VerdictCode::Accept: return "Accept";
    case VerdictCode::RejectSignature: return "RejectSignature";
    case VerdictCode::RejectStale: return "RejectStale";
    case VerdictCode::RejectFingerprint: return "RejectFingerprint";
    case VerdictCode::RejectSanMissing: return "RejectSanMissing";
    case VerdictCode::RejectNotSata: return "RejectNotSata";
    case VerdictCode::RejectCertValidity: return "RejectCertValidity";
    case VerdictCode::RejectTargetMismatch: return "RejectTargetMismatch";
  }
  return "Unknown";
}

std::string_view alt_svc_decision_name(AltSvcDecision d) noexcept {
  return d == AltSvcDecision::Allow ? "Allow" : "Block";
}

Verdict validate_connection(const Sata& s, const CertDescriptor& cert,
                            const Sattestation& header, Date now) {
  // 0: the certificate carries the SATA
  const auto sans = expected_sans(s);
  const bool onion_name = cert.covers(sans[0]) || cert.covers(sans[2]);
  if (!onion_name || !cert.covers(sans[1])) {
    return reject(VerdictCode::RejectSanMissing,
                  "certificate SANs lack " + std::string(onion_name ? sans[1] : sans[0] + " / " + sans[2]));
  }
  if (now < cert.not_before || now > cert.not_after) {
    return reject(VerdictCode::RejectCertValidity,
                  "certificate not valid on " + now.to_string());
  }

  // 1: signature by the key the SATA itself encodes
  if (!header.body.sattestor().same_identity(s)) {
    return reject(VerdictCode::RejectSignature,
                  "SATA header is issued by " + header.body.sattestor_domain + "/" +
                      header.body.sattestor_onion.label() + ", not by the requested SATA");
  }
  if (!header.is_self_sattestation()) {
    return reject(VerdictCode::RejectSignature, "SATA header is not a self-sattestation");
  }
  if (Status st = verify_credential(header); !st) {
    return reject(VerdictCode::RejectSignature, std::string(errc_name(*st.code())) + ": " + st.detail());
  }

  // 2: freshness
  if (Freshness f = check_freshness(header, 0, now); !f.fresh) {
    return reject(VerdictCode::RejectStale, f.status().detail());
  }

  // 3: certificate pinning
  const auto& fps = header.body.sattestees.front().cert_fingerprints;
  if (std::find(fps.begin(), fps.end(), cert.fingerprint) == fps.end()) {
    return reject(VerdictCode::RejectFingerprint,
                  "certificate " + cert.fingerprint + " is not listed in the SATA header");
  }

  std::string detail = "all checks passed";
  detail += cert.has_sct ? "; certificate carries SCTs" : "; no SCT recorded";
  if (const auto& reach = header.body.sattestees.front().onion_reachable) {
    detail += *reach ? "; header says onion-service reachable"
                     : "; header says not onion-service reachable";
  }
  return {VerdictCode::Accept, std::move(detail)};
}

Verdict validate_onion_location(const Origin& origin, std::string_view redirect_target,
                                const CertDescriptor& origin_cert) {
  Sata target;
  try {
    target = parse_sata(redirect_target);
  } catch (const Error& e) {
    return reject(VerdictCode::RejectNotSata,
                  "onion-location target is not a SATA (" + std::string(errc_name(e.code())) + ")");
  }

  const std::string origin_domain = std::holds_alternative<Sata>(origin)
                                        ? std::get<Sata>(origin).domain
                                        : lower(std::get<std::string>(origin));
  if (target.domain != origin_domain) {
    return reject(VerdictCode::RejectTargetMismatch,
                  "target SATA is for " + target.domain + ", origin is " + origin_domain);
  }
  if (const Sata* o = std::get_if<Sata>(&origin); o && !(o->onion == target.onion)) {
    return reject(VerdictCode::RejectTargetMismatch,
                  "target onion differs from the origin SATA's onion");
  }
  const auto sans = expected_sans(target);
  if (!(origin_cert.covers(sans[0]) || origin_cert.covers(sans[2])) ||
      !origin_cert.covers(sans[1])) {
    return reject(VerdictCode::RejectSanMissing,
                  "origin certificate does not carry the target SATA");
  }
  return {VerdictCode::Accept, "target is a SATA covered by the origin certificate"};
}

AltSvcResult validate_alt_svc(const Sata& origin, std::string_view alt_host,
                              const Sattestation* self_satt, const TrustPolicy* policy,
                              std::span<const Sattestation> third_party, Date now) {
  auto block = [](std::string why) { return AltSvcResult{AltSvcDecision::Block, std::move(why)}; };

  std::string host = lower(alt_host);
  if (auto colon = host.rfind(':'); colon != std::string::npos) host.resize(colon);
  if (!has_onion_suffix(host)) return block("alternative endpoint is not an onion service");
  OnionAddress alt;
  try {
    alt = parse_onion(host);
  } catch (const Error& e) {
    return block(std::string("alternative onion is invalid: ") + e.what());
  }
  if (self_satt == nullptr) return block("no self-sattestation for the alternative service");

  const Sata alt_sata{origin.domain, alt, SataForm::QueryString};
  if (!self_satt->is_self_sattestation() || !self_satt->body.sattestor().same_identity(alt_sata)) {
    return block("self-sattestation does not bind " + origin.domain + " to " + alt.label());
  }
  if (Status st = verify_credential(*self_satt); !st) {
    return block("self-sattestation invalid: " + st.detail());
  }
  if (!check_freshness(*self_satt, 0, now).fresh) return block("self-sattestation is stale");

  if (alt == origin.onion) {
    return {AltSvcDecision::Allow, "alternative service is the origin's own onion"};
  }
  if (policy != nullptr) {
    if (RequiredTrust rt = required_trust(*policy, third_party, alt_sata, now);
        rt.required && rt.chain) {
      return {AltSvcDecision::Allow, "alternative onion trusted for '" + rt.chain->label + "'"};
    }
  }
  return block("alternative onion differs from the origin's and is not trusted");
}

}  // namespace satakit
