#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "satakit/credential.hpp"
#include "satakit/digest.hpp"
#include "satakit/onion.hpp"
#include "satakit/sata.hpp"

namespace satakit::test {

inline std::string data_path(const std::string& name) {
  return std::string(SATAKIT_TEST_DATA_DIR) + "/" + name;
}

inline std::string fixtures_path(const std::string& rel) {
  return std::string(SATAKIT_FIXTURES_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Same derivation as the python oracle: seed = SHA-256(name).
inline KeyPair named_key(const std::string& name) {
  Digest256 d = sha256(as_bytes(name));
  Seed seed{};
  std::copy(d.begin(), d.end(), seed.begin());
  return keygen(seed);
}

inline Sata named_sata(const std::string& domain) {
  return make_sata(domain, named_key(domain).onion());
}

inline Date day(const char* iso) { return Date::parse(iso); }

inline const std::string kFp1 =
    "632B119944042F3736A430E42AFC99D9C5F5C346DBD4AAAF8560ACC0607C0297";
inline const std::string kFp2 =
    "23964A136830BAB95953620A6938CA0114F3BDB71410839B0CA0BB66DCF30436";

inline Binding make_binding(const std::string& domain, const OnionAddress& onion,
                            std::vector<std::string> labels, const char* issued,
                            const char* refreshed) {
  Binding b;
  b.domain = domain;
  b.onion = onion;
  b.labels = std::move(labels);
  b.issued = day(issued);
  b.refreshed_on = day(refreshed);
  return b;
}

/// Two-binding third-party credential from sattestora.info.
inline SattestationBody two_binding_body() {
  SattestationBody body;
  body.sattestor_domain = "sattestora.info";
  body.sattestor_onion = named_key("sattestora.info").onion();
  body.refresh_rate_days = 7;
  body.sattestees.push_back(make_binding("domain1.info", named_key("domain1.info").onion(),
                                         {"news"}, "2020-06-01", "2020-08-25"));
  body.sattestees.push_back(make_binding("domain2.info", named_key("domain2.info").onion(),
                                         {"union"}, "2020-06-01", "2020-08-25"));
  return body;
}

/// Attestation from `from` binding `to` with one label, refreshed `refreshed`.
inline Sattestation attest(const KeyPair& key, const std::string& from_domain, const Sata& to,
                           std::vector<std::string> labels, Date issued, Date refreshed,
                           double rate = 7) {
  SattestationBody body;
  body.sattestor_domain = from_domain;
  body.sattestor_onion = key.onion();
  body.refresh_rate_days = rate;
  Binding b;
  b.domain = to.domain;
  b.onion = to.onion;
  b.labels = std::move(labels);
  b.issued = issued;
  b.refreshed_on = refreshed;
  body.sattestees.push_back(std::move(b));
  return issue(key, std::move(body));
}

}  // namespace satakit::test
