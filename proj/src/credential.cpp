#include "satakit/credential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "satakit/url.hpp"

namespace satakit {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kDaysSuffix = " days";

bool has_comma_or_empty(const std::string& label) {
  return label.empty() || label.find(',') != std::string::npos;
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (has_comma_or_empty(labels[i])) {
      throw Error(Errc::UnrepresentableField,
                  "label '" + labels[i] + "' is empty or contains a comma");
    }
    if (i) out += ",";
    out += labels[i];
  }
  return out;
}

std::vector<std::string> split_labels(std::string_view joined) {
  std::vector<std::string> out;
  while (true) {
    auto comma = joined.find(',');
    out.emplace_back(joined.substr(0, comma));
    if (comma == std::string_view::npos) break;
    joined = joined.substr(comma + 1);
  }
  return out;
}

std::string date_field(const Date& d) {
  std::string s = d.to_string();
  if (s.size() != 10) {
    throw Error(Errc::UnrepresentableField, "date outside YYYY-MM-DD range");
  }
  return s;
}

ojson body_json(const SattestationBody& body) {
  ojson sattestees = ojson::array();
  for (const Binding& b : body.sattestees) {
    ojson j;
    j["domain"] = b.domain;
    j["onion"] = b.onion.label();
    if (!b.labels.empty()) j["labels"] = join_labels(b.labels);
    if (!b.cert_fingerprints.empty()) j["cert_fingerprint"] = b.cert_fingerprints;
    j["issued"] = date_field(b.issued);
    j["refreshed_on"] = date_field(b.refreshed_on);
    if (b.onion_reachable) j["onion_reachable"] = *b.onion_reachable;
    sattestees.push_back(std::move(j));
  }
  ojson inner;
  inner["sattestation_version"] = body.version;
  inner["sattestor_domain"] = body.sattestor_domain;
  inner["sattestor_onion"] = body.sattestor_onion.label();
  inner["sattestor_refresh_rate"] = format_refresh_rate(body.refresh_rate_days);
  inner["sattestees"] = std::move(sattestees);
  ojson outer;
  outer["sattestation"] = std::move(inner);
  return outer;
}

template <typename T>
T member(const ojson& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(Errc::ParseError, std::string("missing field '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::UnrepresentableField, std::string("field '") + key + "' has the wrong type");
  }
}

Date date_member(const ojson& obj, const char* key) {
  try {
    return Date::parse(member<std::string>(obj, key));
  } catch (const Error& e) {
    if (e.code() == Errc::ParseError && obj.contains(key)) {
      throw Error(Errc::UnrepresentableField, std::string("field '") + key + "' is not a date");
    }
    throw;
  }
}

OnionAddress onion_member(const ojson& obj, const char* key) {
  std::string label = member<std::string>(obj, key);
  try {
    return parse_onion(label);
  } catch (const Error& e) {
    throw Error(Errc::UnrepresentableField,
                std::string("field '") + key + "' is not an onion address: " + e.what());
  }
}

SattestationBody body_from_json(const ojson& root) {
  if (!root.is_object() || !root.contains("sattestation")) {
    throw Error(Errc::ParseError, "missing 'sattestation' object");
  }
  const ojson& inner = root.at("sattestation");
  if (!inner.is_object()) throw Error(Errc::ParseError, "'sattestation' is not an object");

  SattestationBody body;
  body.version = member<int>(inner, "sattestation_version");
  body.sattestor_domain = member<std::string>(inner, "sattestor_domain");
  body.sattestor_onion = onion_member(inner, "sattestor_onion");
  try {
    body.refresh_rate_days = parse_refresh_rate(member<std::string>(inner, "sattestor_refresh_rate"));
  } catch (const Error& e) {
    if (e.code() != Errc::ParseError || !inner.contains("sattestor_refresh_rate")) throw;
    throw Error(Errc::UnrepresentableField, e.detail());
  }
  auto list = inner.find("sattestees");
  if (list == inner.end() || !list->is_array()) {
    throw Error(Errc::ParseError, "'sattestees' must be an array");
  }
  for (const ojson& j : *list) {
    if (!j.is_object()) throw Error(Errc::ParseError, "sattestee entry is not an object");
    Binding b;
    b.domain = member<std::string>(j, "domain");
    b.onion = onion_member(j, "onion");
    if (j.contains("labels")) b.labels = split_labels(member<std::string>(j, "labels"));
    if (j.contains("cert_fingerprint")) {
      b.cert_fingerprints = member<std::vector<std::string>>(j, "cert_fingerprint");
    }
    b.issued = date_member(j, "issued");
    b.refreshed_on = date_member(j, "refreshed_on");
    if (j.contains("onion_reachable")) b.onion_reachable = member<bool>(j, "onion_reachable");
    body.sattestees.push_back(std::move(b));
  }
  return body;
}

ojson parse_json(std::string_view text) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

Sattestation from_transport_json(const ojson& root) {
  Sattestation s;
  s.body = body_from_json(root);
  std::string sig_hex = member<std::string>(root, "signature");
  Bytes sig;
  try {
    sig = from_hex(sig_hex);
  } catch (const Error&) {
    throw Error(Errc::UnrepresentableField, "signature is not hex");
  }
  if (sig.size() != kSignatureSize) {
    throw Error(Errc::MalformedSignature, "signature must be 64 bytes");
  }
  std::copy(sig.begin(), sig.end(), s.signature.begin());
  return s;
}

bool is_fingerprint(const std::string& fp) {
  return fp.size() == 64 && std::all_of(fp.begin(), fp.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F');
         });
}

}  // namespace

bool Binding::has_label(std::string_view label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

bool SattestationBody::is_self_form() const {
  return sattestees.size() == 1 && sattestees.front().domain == sattestor_domain &&
         sattestees.front().onion == sattestor_onion;
}

bool is_rotation_pointer_label(std::string_view label) noexcept {
  constexpr std::string_view open = "sattestor({";
  constexpr std::string_view close = "})";
  return label.size() > open.size() + close.size() && label.substr(0, open.size()) == open &&
         label.substr(label.size() - close.size()) == close;
}

std::string format_refresh_rate(double days) {
  if (!std::isfinite(days) || days <= 0) {
    throw Error(Errc::UnrepresentableField, "refresh rate must be a positive number of days");
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, days);
  if (ec != std::errc{}) throw Error(Errc::UnrepresentableField, "refresh rate");
  return std::string(buf, ptr) + std::string(kDaysSuffix);
}

double parse_refresh_rate(std::string_view text) {
  if (text.size() <= kDaysSuffix.size() ||
      text.substr(text.size() - kDaysSuffix.size()) != kDaysSuffix) {
    throw Error(Errc::ParseError, "refresh rate must look like '<number> days'");
  }
  std::string_view number = text.substr(0, text.size() - kDaysSuffix.size());
  double value = 0;
  auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (ec != std::errc{} || ptr != number.data() + number.size() || !std::isfinite(value) ||
      value <= 0) {
    throw Error(Errc::ParseError, "bad refresh rate '" + std::string(text) + "'");
  }
  return value;
}

Bytes canonical_bytes(const SattestationBody& body) {
  std::string s = body_json(body).dump();
  return Bytes(s.begin(), s.end());
}

std::string to_transport(const Sattestation& s) {
  ojson j = body_json(s.body);
  j["signature"] = to_hex(s.signature);
  return j.dump();
}

std::size_t transport_size(const Sattestation& s) { return to_transport(s).size(); }

Sattestation parse_sattestation(std::string_view json) {
  return from_transport_json(parse_json(json));
}

SattestationBody parse_body(std::string_view json) { return body_from_json(parse_json(json)); }

std::string to_wellknown(std::span<const Sattestation> list) {
  ojson arr = ojson::array();
  for (const auto& s : list) arr.push_back(ojson::parse(to_transport(s)));
  return arr.dump();
}

std::vector<Sattestation> parse_wellknown(std::string_view json) {
  ojson arr = parse_json(json);
  if (!arr.is_array()) throw Error(Errc::ParseError, "well-known document must be a JSON array");
  std::vector<Sattestation> out;
  for (const ojson& j : arr) out.push_back(from_transport_json(j));
  return out;
}

Status check_structure(const SattestationBody& body) {
  auto violation = [](std::string what) {
    return Status::fail(Errc::StructuralViolation, std::move(what));
  };
  if (body.version != kSattestationVersion) {
    return violation("sattestation_version must be 1");
  }
  if (!is_valid_domain(body.sattestor_domain) ||
      normalize_domain(body.sattestor_domain) != body.sattestor_domain) {
    return violation("sattestor_domain is not a lowercase DNS name");
  }
  if (!std::isfinite(body.refresh_rate_days) || body.refresh_rate_days <= 0) {
    return violation("refresh rate must be positive");
  }
  if (body.sattestees.empty()) return violation("sattestees must not be empty");

  const bool self_form = body.is_self_form();
  for (std::size_t i = 0; i < body.sattestees.size(); ++i) {
    const Binding& b = body.sattestees[i];
    const std::string at = "sattestee " + std::to_string(i) + ": ";
    if (!is_valid_domain(b.domain) || normalize_domain(b.domain) != b.domain) {
      return violation(at + "domain is not a lowercase DNS name");
    }
    if (b.refreshed_on < b.issued) return violation(at + "refreshed_on precedes issued");
    std::set<std::string> seen;
    for (const auto& label : b.labels) {
      if (has_comma_or_empty(label)) return violation(at + "label empty or contains a comma");
      if (!seen.insert(label).second) return violation(at + "duplicate label '" + label + "'");
    }
    for (const auto& fp : b.cert_fingerprints) {
      if (!is_fingerprint(fp)) {
        return violation(at + "cert fingerprint is not 64 uppercase hex chars");
      }
    }
    if (!b.cert_fingerprints.empty() && !self_form) {
      return violation(at +
                       "cert fingerprints are only allowed in a self-sattestation with a "
                       "single binding naming the sattestor");
    }
  }
  if (self_form) {
    const Binding& b = body.sattestees.front();
    const bool rotation_pointer =
        b.labels.size() == 1 && is_rotation_pointer_label(b.labels.front());
    if (b.cert_fingerprints.empty() && !rotation_pointer) {
      return violation("self-sattestation must bind at least one cert fingerprint");
    }
  }
  return Status::ok();
}

Sattestation issue(const KeyPair& sattestor_key, SattestationBody body) {
  if (sattestor_key.public_key != body.sattestor_onion.public_key()) {
    throw Error(Errc::KeyMismatch, "signing key does not match sattestor_onion");
  }
  if (Status st = check_structure(body); !st) {
    throw Error(Errc::StructuralViolation, st.detail());
  }
  Sattestation s;
  s.signature = sign(sattestor_key.secret, canonical_bytes(body));
  s.body = std::move(body);
  return s;
}

Status verify_credential(const Sattestation& s) {
  if (Status st = check_structure(s.body); !st) return st;
  Bytes message;
  try {
    message = canonical_bytes(s.body);
  } catch (const Error& e) {
    return Status::fail(Errc::StructuralViolation, e.what());
  }
  if (!verify(s.body.sattestor_onion.public_key(), message, s.signature)) {
    return Status::fail(Errc::BadSignature,
                        "signature does not verify under sattestor_onion " +
                            s.body.sattestor_onion.label());
  }
  return Status::ok();
}

Sattestation make_self_sattestation(const KeyPair& key, std::string_view domain,
                                    std::vector<std::string> cert_fingerprints,
                                    std::vector<std::string> labels, Date issued,
                                    Date refreshed_on, double refresh_rate_days) {
  if (cert_fingerprints.empty()) {
    throw Error(Errc::NoFingerprints, "a self-sattestation binds at least one certificate");
  }
  for (auto& fp : cert_fingerprints) {
    std::transform(fp.begin(), fp.end(), fp.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  }
  SattestationBody body;
  body.sattestor_domain = normalize_domain(domain);
  body.sattestor_onion = key.onion();
  body.refresh_rate_days = refresh_rate_days;
  Binding b;
  b.domain = body.sattestor_domain;
  b.onion = body.sattestor_onion;
  b.labels = std::move(labels);
  b.cert_fingerprints = std::move(cert_fingerprints);
  b.issued = issued;
  b.refreshed_on = refreshed_on;
  body.sattestees.push_back(std::move(b));

  Sattestation s = issue(key, std::move(body));
  if (std::size_t size = transport_size(s); size >= kSelfSattestationMaxBytes) {
    throw Error(Errc::TooLarge, "transport encoding is " + std::to_string(size) +
                                    " bytes; limit is under 800");
  }
  return s;
}

Status Freshness::status() const {
  if (fresh) return Status::ok();
  return Status::fail(Errc::Stale,
                      "reference date " + reference.to_string() + " is " +
                          std::to_string(age_days) + " days from now; refresh rate " +
                          format_refresh_rate(refresh_rate_days) + " (missed by " +
                          std::to_string(margin_days()) + " days)");
}

Freshness check_freshness(const Sattestation& s, std::size_t binding_index, Date now) {
  if (binding_index >= s.body.sattestees.size()) {
    throw Error(Errc::OutOfRange, "binding index " + std::to_string(binding_index) +
                                      " out of range");
  }
  const Binding& b = s.body.sattestees[binding_index];
  Freshness f;
  f.reference = b.refreshed_on != b.issued ? b.refreshed_on : b.issued;
  f.age_days = std::llabs(days_between(f.reference, now));
  f.refresh_rate_days = s.body.refresh_rate_days;
  f.fresh = static_cast<double>(f.age_days) < f.refresh_rate_days;
  return f;
}

}  // namespace satakit
