#include "satakit/sim.hpp"

#include <algorithm>
#include <utility>

#include "satakit/error.hpp"
#include "satakit/url.hpp"

namespace satakit::sim {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr int kMaxRedirects = 3;

bool under(std::string_view name, std::string_view domain) {
  if (name == domain) return true;
  return name.size() > domain.size() && name.ends_with(domain) &&
         name[name.size() - domain.size() - 1] == '.';
}

struct Resolved {
  const SiteRecord* record = nullptr;
  bool substituted = false;
};

Resolved resolve(const World& w, const std::string& host, bool hijack) {
  if (hijack && !has_onion_suffix(host) && w.attacker.dns_hijack.contains(host)) {
    if (auto it = w.attacker.substitutes.find(host); it != w.attacker.substitutes.end()) {
      return {&it->second, true};
    }
  }
  if (auto it = w.sites.find(host); it != w.sites.end()) return {&it->second, false};
  throw Error(Errc::UnknownHost, "no endpoint answers for " + host);
}

// Honest rulesets, overlaid by attacker-published ones when the attacker
// controls what the browser fetches.
std::map<std::string, std::string> effective_ruleset(const World& w) {
  std::map<std::string, std::string> rules;
  std::vector<const SiteRecord*> attacker_records;
  for (const auto& [host, rec] : w.sites) {
    if (rec.operated_by == Operator::Honest) {
      for (const auto& [k, v] : rec.he_rules) rules[k] = v;
    } else {
      attacker_records.push_back(&rec);
    }
  }
  if (w.attacker.ruleset_control) {
    for (const auto& [host, rec] : w.attacker.substitutes) attacker_records.push_back(&rec);
    for (const SiteRecord* rec : attacker_records) {
      for (const auto& [k, v] : rec->he_rules) rules[k] = v;
    }
  }
  return rules;
}

bool ca_will_issue(const World& w, const SiteRecord& rec, const std::string& name) {
  if (rec.operated_by == Operator::Honest) return true;
  if (w.attacker.rogue_cert_for.contains(name)) return true;
  return std::any_of(w.attacker.owned_domains.begin(), w.attacker.owned_domains.end(),
                     [&](const std::string& d) { return under(name, d); });
}

std::optional<std::string> tls_failure(const World& w, const SiteRecord& rec,
                                       const std::string& name, Date today) {
  if (!rec.cert) return "no certificate presented";
  if (!rec.cert->covers(name)) return "certificate does not cover " + name;
  if (!ca_will_issue(w, rec, name)) return "certificate for " + name + " is not CA-issued";
  if (today < rec.cert->not_before || rec.cert->not_after < today) {
    return "certificate outside its validity window";
  }
  return std::nullopt;
}

void alert(Outcome& o, std::string why) {
  o.user_visible_alert = true;
  o.completed = false;
  o.trace.push_back("alert: " + std::move(why));
}

void navigate(World& w, const std::string& url_text, SimTime at, const Visit& visit,
              Outcome& o, int redirects) {
  const Date today = date_of(at);
  const bool aware = w.browser.sata_aware;
  const TrustPolicy* policy = w.effective_policy();

  Url url;
  try {
    url = parse_url(url_text);
  } catch (const Error& e) {
    throw Error(Errc::BadFixture, "visit URL: " + std::string(e.what()));
  }
  const std::string origin_host = url.host;
  std::string direct_host = origin_host;
  std::optional<Sata> expected;

  const auto rules = effective_ruleset(w);
  if (is_securedrop_name(origin_host)) {
    auto rule = rules.find(origin_host);
    if (rule == rules.end()) throw Error(Errc::UnknownHost, "no ruleset entry for " + origin_host);
    if (aware) {
      try {
        auto param = url.query_param(kSataQueryParam);
        SecureDropTarget sd = securedrop_rewrite(
            origin_host, param ? std::optional<std::string_view>(*param) : std::nullopt);
        if (sd.onion) expected = make_sata(sd.base_domain, *sd.onion);
      } catch (const Error& e) {
        o.verdicts.push_back({VerdictCode::RejectNotSata, e.what()});
        alert(o, "securedrop name is not a SATA");
        return;
      }
    }
    direct_host = parse_onion(rule->second).host();
    o.trace.push_back("ruleset: " + origin_host + " -> " + direct_host);
  } else {
    if (auto rule = rules.find(origin_host); rule != rules.end()) {
      direct_host = parse_onion(rule->second).host();
      o.trace.push_back("ruleset: " + origin_host + " -> " + direct_host);
    }
    if (aware) {
      try {
        expected = parse_sata(url_text);
      } catch (const Error& e) {
        if (e.code() != Errc::NotASata) {
          o.verdicts.push_back({VerdictCode::RejectNotSata, e.what()});
          alert(o, "malformed SATA URL");
          return;
        }
      }
    }
  }

  std::string connect_host = direct_host;
  bool via_alt = false;
  if (auto it = w.browser.alt_svc_cache.find(origin_host); it != w.browser.alt_svc_cache.end()) {
    if (at < it->second.expires) {
      connect_host = it->second.alt_host;
      via_alt = true;
      o.trace.push_back("alt-svc cache: " + origin_host + " -> " + connect_host);
    } else {
      o.trace.push_back("alt-svc cache entry for " + origin_host + " expired");
      w.browser.alt_svc_cache.erase(it);
    }
  }

  Resolved r = resolve(w, connect_host, visit.hijack);
  if (via_alt) {
    // An alternative must prove authority for the origin, else fall back.
    if (auto why = tls_failure(w, *r.record, origin_host, today)) {
      o.trace.push_back("alt-svc endpoint rejected (" + *why + "), falling back");
      connect_host = direct_host;
      via_alt = false;
      r = resolve(w, connect_host, visit.hijack);
    }
  }
  const SiteRecord& rec = *r.record;
  o.contacted.push_back(connect_host);
  o.reached_endpoint = rec.endpoint_id;
  o.attacker_controlled = rec.operated_by == Operator::Attacker;
  o.via_alt_svc = via_alt;
  o.completed = false;
  if (r.substituted) o.trace.push_back("dns: " + connect_host + " answered by substitute");

  if (!via_alt && !has_onion_suffix(connect_host)) {
    if (auto why = tls_failure(w, rec, connect_host, today)) {
      alert(o, "TLS: " + *why);
      return;
    }
  }

  const SiteHeaders& h = rec.headers;
  const Sattestation* header = h.sata_header ? &*h.sata_header : nullptr;
  if (h.alt_svc) {
    const std::string& alt = h.alt_svc->host_for(visit.user);
    bool store = !aware;
    if (aware) {
      AltSvcResult ar = expected
                            ? validate_alt_svc(*expected, alt, header, policy, w.credentials, today)
                            : AltSvcResult{AltSvcDecision::Block, "origin is not a SATA"};
      store = ar.decision == AltSvcDecision::Allow;
      o.alt_svc.push_back({origin_host, alt, ar.decision, ar.reason});
    }
    if (store) {
      SimTime expires = at + h.alt_svc->max_age_s;
      w.browser.alt_svc_cache[origin_host] = AltSvcEntry{alt, expires};
      o.cache_writes.push_back({origin_host, alt, expires});
    }
  }

  if (aware && expected) {
    Verdict v;
    if (!rec.cert) {
      v = {VerdictCode::RejectSanMissing, "no certificate presented"};
    } else if (header == nullptr) {
      v = validate_connection(*expected, *rec.cert, Sattestation{}, today);
      if (v.outcome == VerdictCode::RejectSignature) v.detail = "no SATA header";
    } else {
      v = validate_connection(*expected, *rec.cert, *header, today);
    }
    o.verdicts.push_back(v);
    if (!v.accepted()) {
      alert(o, std::string(verdict_name(v.outcome)) + ": " + v.detail);
      return;
    }
    if (policy != nullptr) {
      RequiredTrust rt = required_trust(*policy, w.credentials, *expected, today);
      if (rt.required) {
        o.trusted = rt.satisfied();
        if (!rt.satisfied()) {
          alert(o, "no trusted sattestation for " + expected->domain);
          return;
        }
      }
    }
  }
  o.completed = true;

  if (!h.onion_location) return;
  if (redirects >= kMaxRedirects) {
    o.trace.push_back("onion-location ignored: redirect limit");
    return;
  }
  const std::string& target = *h.onion_location;
  if (!aware) {
    Url t;
    try {
      t = parse_url(target);
    } catch (const Error&) {
      o.trace.push_back("onion-location ignored: unparsable");
      return;
    }
    if (!has_onion_suffix(t.host)) {
      o.trace.push_back("onion-location ignored: not an onion URL");
      return;
    }
  } else {
    Origin origin = expected ? Origin{*expected} : Origin{origin_host};
    Verdict v = rec.cert ? validate_onion_location(origin, target, *rec.cert)
                         : Verdict{VerdictCode::RejectSanMissing, "no certificate presented"};
    o.verdicts.push_back(v);
    if (!v.accepted()) {
      alert(o, "onion-location " + std::string(verdict_name(v.outcome)) + ": " + v.detail);
      return;
    }
  }
  if (!w.browser.prioritize_onion) {
    o.trace.push_back("onion-location offered: " + target);
    return;
  }
  o.trace.push_back("onion-location followed: " + target);
  navigate(w, target, at, visit, o, redirects + 1);
}

void validate_record(const World& w, const std::string& host, const SiteRecord& rec) {
  if (rec.endpoint_id.empty()) throw Error(Errc::BadFixture, host + ": empty endpoint id");
  if (rec.cert && !rec.cert->der.empty() &&
      rec.cert->fingerprint != fingerprint_cert(rec.cert->der)) {
    throw Error(Errc::BadFixture, host + ": certificate fingerprint does not match its bytes");
  }
  if (!rec.headers.sata_header) return;
  const bool attacker_key =
      w.attacker.onion_keys.contains(rec.headers.sata_header->body.sattestor_onion);
  if (rec.operated_by == Operator::Attacker && !attacker_key &&
      !w.attacker.compromised_victim_onion_key) {
    throw Error(Errc::BadFixture,
                host + ": attacker presents a header signed by a key it does not hold");
  }
  if (rec.operated_by == Operator::Honest && attacker_key) {
    throw Error(Errc::BadFixture, host + ": honest site signs with an attacker key");
  }
}

}  // namespace

SimTime start_of(Date day) noexcept { return day.days_since_epoch() * kSecondsPerDay; }

Date date_of(SimTime t) noexcept {
  std::int64_t days = t / kSecondsPerDay;
  if (t % kSecondsPerDay < 0) --days;
  return Date{std::chrono::sys_days{std::chrono::days{days}}};
}

const std::string& AltSvcHeader::host_for(const std::string& user) const {
  auto it = per_user.find(user);
  return it == per_user.end() ? host : it->second;
}

const TrustPolicy* World::effective_policy() const {
  if (browser.policy) return &*browser.policy;
  if (browser.use_world_policy && policy) return &*policy;
  return nullptr;
}

void World::validate() const {
  for (const auto& [host, rec] : sites) validate_record(*this, host, rec);
  for (const auto& [host, rec] : attacker.substitutes) {
    if (rec.operated_by != Operator::Attacker) {
      throw Error(Errc::BadFixture, host + ": substitutes are attacker-operated");
    }
    validate_record(*this, host, rec);
  }
}

VisitResult run_visit(World world, const Visit& visit, SimTime at) {
  Outcome o;
  o.url = visit.url;
  navigate(world, visit.url, at, visit, o, 0);
  return {std::move(o), std::move(world)};
}

const std::string& MatrixRow::final_endpoint() const {
  static const std::string none = "none";
  return visits.empty() ? none : visits.back().reached_endpoint;
}

bool MatrixRow::silent_attacker_success() const {
  return std::any_of(visits.begin(), visits.end(),
                     [](const Outcome& o) { return o.silent_attacker_success(); });
}

std::vector<MatrixRow> run_matrix(std::span<const Scenario> scenarios,
                                  std::span<const BrowserConfig> browsers, SimTime now) {
  std::vector<MatrixRow> rows;
  for (const Scenario& sc : scenarios) {
    for (const BrowserConfig& b : browsers) {
      World w = sc.world;
      w.browser = b;
      MatrixRow row{sc.name, b.name, {}};
      for (const Visit& v : sc.visits) {
        VisitResult r = run_visit(std::move(w), v, now + v.offset_s);
        row.visits.push_back(std::move(r.outcome));
        w = std::move(r.world);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

TrackingReport track_alt_svc_exposure(const World& world, std::span<const Visit> visits,
                                      SimTime now) {
  std::vector<std::size_t> order(visits.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return visits[a].offset_s < visits[b].offset_s;
  });

  std::map<std::string, BrowserConfig> per_user;
  std::map<std::string, OriginExposure> exposure;
  World w = world;
  for (std::size_t i : order) {
    const Visit& v = visits[i];
    auto [it, fresh] = per_user.try_emplace(v.user, world.browser);
    w.browser = it->second;
    VisitResult r = run_visit(std::move(w), v, now + v.offset_s);
    w = std::move(r.world);
    it->second = w.browser;

    const Outcome& o = r.outcome;
    const std::string origin = parse_url(v.url).host;
    if (o.via_alt_svc && !o.contacted.empty()) {
      exposure[origin].entries.push_back({v.user, i, o.contacted.front(), true});
    }
    for (const CacheWrite& cw : o.cache_writes) {
      exposure[cw.origin].entries.push_back({v.user, i, cw.alt_host, false});
    }
  }

  TrackingReport report;
  for (auto& [origin, e] : exposure) {
    e.origin = origin;
    std::map<std::string, std::set<std::string>> hosts_by_user;
    for (const TrackingEntry& t : e.entries) {
      e.distinct_alt_hosts.insert(t.alt_host);
      hosts_by_user[t.user].insert(t.alt_host);
    }
    std::set<std::set<std::string>> views;
    for (const auto& [user, hosts] : hosts_by_user) views.insert(hosts);
    e.distinguishable = views.size() > 1;
    report.origins.push_back(std::move(e));
  }
  return report;
}

RotationAttackResult simulate_rotation_attack(const World& world, const Sata& victim,
                                              const KeyPair& stolen_key,
                                              const KeyPair& attacker_key,
                                              std::string_view label, Date now) {
  if (!world.attacker.compromised_victim_onion_key) {
    throw Error(Errc::BadFixture, "attacker does not hold the victim's onion key");
  }
  if (stolen_key.onion() != victim.onion) {
    throw Error(Errc::KeyMismatch, "stolen key does not match the victim onion");
  }
  const TrustPolicy* policy = world.effective_policy();
  if (policy == nullptr && world.policy) policy = &*world.policy;
  if (policy == nullptr) throw Error(Errc::BadFixture, "rotation attack needs a trust policy");

  const Sata forged = make_sata(victim.domain, attacker_key.onion());
  auto peer = [&](const Sata& from, const Sata& to, const KeyPair& key) {
    SattestationBody b;
    b.sattestor_domain = from.domain;
    b.sattestor_onion = from.onion;
    Binding bind;
    bind.domain = to.domain;
    bind.onion = to.onion;
    bind.labels = {std::string(label)};
    bind.issued = now;
    bind.refreshed_on = now;
    b.sattestees.push_back(std::move(bind));
    return issue(key, std::move(b));
  };

  std::vector<Sattestation> creds = world.credentials;
  creds.push_back(peer(victim, forged, stolen_key));
  creds.push_back(peer(forged, victim, attacker_key));

  RotationAttackResult res;
  res.rotation = rotation_check(victim, forged, creds, now);
  res.new_trust =
      evaluate_trust_propagation_after_rotation(*policy, creds, victim, forged, label, now);
  res.old_trust = evaluate(*policy, creds, victim, label, now);
  return res;
}

}  // namespace satakit::sim
