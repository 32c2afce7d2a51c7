#include "satakit/fixture.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "satakit/digest.hpp"
#include "satakit/error.hpp"

namespace satakit::sim {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::BadFixture, what); }

struct Key {
  KeyPair pair;
  Operator owner = Operator::Honest;
};

class Loader {
 public:
  explicit Loader(SimTime now) : now_(now), today_(date_of(now)) {}

  Scenario load(std::string_view text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      bad(std::string("fixture is not JSON: ") + e.what());
    }
    if (!j.is_object()) bad("fixture must be an object");
    try {
      return build(j);
    } catch (const json::exception& e) {
      bad(std::string("fixture field: ") + e.what());
    }
  }

 private:
  Scenario build(json& j) {
    Scenario sc;
    sc.name = j.value("name", "");
    if (sc.name.empty()) bad("fixture needs a name");
    sc.description = j.value("description", "");

    if (j.contains("keys")) {
      for (auto& [name, k] : j.at("keys").items()) keys_.emplace(name, parse_key(name, k));
    }
    for (const auto& [name, k] : keys_) sc.keys.emplace(name, k.pair);

    json body = expand(j);
    World& w = sc.world;
    for (const auto& [name, k] : keys_) {
      if (k.owner == Operator::Attacker) w.attacker.onion_keys.insert(k.pair.onion());
    }
    if (body.contains("sites")) {
      for (auto& [host, rec] : body.at("sites").items()) {
        w.sites.emplace(host, parse_record(host, rec, Operator::Honest));
      }
    }
    if (body.contains("attacker")) parse_attacker(body.at("attacker"), w.attacker);
    if (body.contains("credentials")) {
      for (auto& c : body.at("credentials")) w.credentials.push_back(parse_credential(c));
    }
    if (body.contains("policy")) w.policy = parse_trust_policy(body.at("policy").dump());
    if (body.contains("browser")) w.browser = parse_browser_config(body.at("browser").dump());
    if (body.contains("visits")) {
      for (auto& v : body.at("visits")) {
        Visit visit;
        visit.url = v.at("url").get<std::string>();
        visit.offset_s = v.value("offset_s", std::int64_t{0});
        visit.hijack = v.value("hijack", true);
        visit.user = v.value("user", std::string("user"));
        sc.visits.push_back(std::move(visit));
      }
    }
    w.validate();
    return sc;
  }

  Key parse_key(const std::string& name, const json& k) {
    Key key;
    Seed seed{};
    if (k.contains("seed")) {
      seed = seed_from_hex(k.at("seed").get<std::string>());
    } else if (k.contains("seed_text")) {
      Digest256 d = sha256(as_bytes(k.at("seed_text").get<std::string>()));
      std::copy(d.begin(), d.end(), seed.begin());
    } else {
      bad("key " + name + " needs seed or seed_text");
    }
    key.pair = keygen(seed);
    const std::string owner = k.value("owner", std::string("honest"));
    if (owner == "attacker") {
      key.owner = Operator::Attacker;
    } else if (owner != "honest") {
      bad("key " + name + ": owner must be honest or attacker");
    }
    return key;
  }

  const Key& key(const std::string& name) const {
    auto it = keys_.find(name);
    if (it == keys_.end()) bad("unknown key " + name);
    return it->second;
  }

  std::string substitute(const std::string& s) const {
    std::string out;
    std::size_t pos = 0;
    while (true) {
      std::size_t open = s.find("${", pos);
      if (open == std::string::npos) break;
      std::size_t close = s.find('}', open);
      if (close == std::string::npos) bad("unterminated placeholder in '" + s + "'");
      out.append(s, pos, open - pos);
      std::string inner = s.substr(open + 2, close - open - 2);
      std::vector<std::string> parts;
      std::stringstream ss(inner);
      for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
      if (parts.size() == 2 && parts[0] == "onion") {
        out += key(parts[1]).pair.onion().label();
      } else if (parts.size() == 2 && parts[0] == "onionhost") {
        out += key(parts[1]).pair.onion().host();
      } else if (parts.size() == 3 && parts[0] == "satahost") {
        out += to_subdomain_form(make_sata(parts[2], key(parts[1]).pair.onion()));
      } else {
        bad("unknown placeholder ${" + inner + "}");
      }
      pos = close + 1;
    }
    out.append(s, pos, std::string::npos);
    return out;
  }

  json expand(const json& j) const {
    if (j.is_string()) return substitute(j.get<std::string>());
    if (j.is_array()) {
      json out = json::array();
      for (const auto& e : j) out.push_back(expand(e));
      return out;
    }
    if (j.is_object()) {
      json out = json::object();
      for (const auto& [k, v] : j.items()) {
        if (k == "keys") continue;
        out[substitute(k)] = expand(v);
      }
      return out;
    }
    return j;
  }

  Date date(const json& v) const {
    const std::string s = v.get<std::string>();
    if (s == "now") return today_;
    if (s.starts_with("now") && s.size() > 4 && s.back() == 'd' && (s[3] == '-' || s[3] == '+')) {
      long long n = 0;
      auto [p, ec] = std::from_chars(s.data() + 4, s.data() + s.size() - 1, n);
      if (ec != std::errc{} || p != s.data() + s.size() - 1) bad("bad relative date " + s);
      return today_.plus_days(s[3] == '-' ? -n : n);
    }
    try {
      return Date::parse(s);
    } catch (const Error&) {
      bad("bad date " + s);
    }
  }

  Date date_or(const json& obj, const char* field, Date fallback) const {
    return obj.contains(field) ? date(obj.at(field)) : fallback;
  }

  SiteRecord parse_record(const std::string& host, const json& r, Operator dflt) {
    SiteRecord rec;
    rec.endpoint_id = r.value("endpoint", host);
    const std::string op = r.value("operator", dflt == Operator::Attacker ? "attacker" : "honest");
    if (op == "attacker") {
      rec.operated_by = Operator::Attacker;
    } else if (op == "honest") {
      rec.operated_by = Operator::Honest;
    } else {
      bad(host + ": operator must be honest or attacker");
    }
    if (r.contains("cert")) {
      const json& c = r.at("cert");
      Bytes der;
      if (c.contains("der_hex")) {
        der = from_hex(c.at("der_hex").get<std::string>());
      } else {
        std::string text = c.value("der_text", "cert:" + rec.endpoint_id + ":" + host);
        der.assign(text.begin(), text.end());
      }
      std::vector<std::string> sans = c.value("san", std::vector<std::string>{host});
      rec.cert = make_cert_descriptor(std::move(der), std::move(sans),
                                      date_or(c, "not_before", today_.plus_days(-30)),
                                      date_or(c, "not_after", today_.plus_days(60)),
                                      c.value("has_sct", false));
    }
    if (r.contains("headers")) {
      const json& h = r.at("headers");
      if (h.contains("onion_location")) {
        rec.headers.onion_location = h.at("onion_location").get<std::string>();
      }
      if (h.contains("alt_svc")) {
        const json& a = h.at("alt_svc");
        AltSvcHeader alt;
        alt.host = a.at("host").get<std::string>();
        alt.max_age_s = a.value("max_age", kDefaultAltSvcMaxAge);
        if (a.contains("per_user")) {
          alt.per_user = a.at("per_user").get<std::map<std::string, std::string>>();
        }
        rec.headers.alt_svc = std::move(alt);
      }
      if (h.contains("sata_header")) {
        rec.headers.sata_header = parse_header(host, h.at("sata_header"), rec);
      } else if (h.contains("sata_header_transport")) {
        rec.headers.sata_header =
            parse_sattestation(h.at("sata_header_transport").get<std::string>());
      }
    }
    if (r.contains("he_rules")) {
      rec.he_rules = r.at("he_rules").get<std::map<std::string, std::string>>();
    }
    return rec;
  }

  Sattestation parse_header(const std::string& host, const json& h, const SiteRecord& rec) {
    const Key& signer = key(h.at("signer").get<std::string>());
    std::vector<std::string> fps;
    if (h.contains("fingerprints")) {
      fps = h.at("fingerprints").get<std::vector<std::string>>();
    } else if (rec.cert) {
      fps.push_back(rec.cert->fingerprint);
    }
    Sattestation s = make_self_sattestation(
        signer.pair, h.at("domain").get<std::string>(), std::move(fps),
        h.value("labels", std::vector<std::string>{}), date_or(h, "issued", today_.plus_days(-30)),
        date_or(h, "refreshed_on", today_.plus_days(-1)), h.value("refresh_days", 7.0));
    if (h.contains("onion_reachable")) {
      s.body.sattestees.front().onion_reachable = h.at("onion_reachable").get<bool>();
      s = issue(signer.pair, s.body);
    }
    (void)host;
    return s;
  }

  void parse_attacker(const json& a, AttackerCaps& caps) {
    auto strings = [&](const char* field) {
      return a.value(field, std::vector<std::string>{});
    };
    for (auto& s : strings("rogue_cert_for")) caps.rogue_cert_for.insert(s);
    for (auto& s : strings("dns_hijack")) caps.dns_hijack.insert(s);
    for (auto& s : strings("owned_domains")) caps.owned_domains.insert(s);
    caps.ruleset_control = a.value("ruleset_control", false);
    caps.compromised_victim_onion_key = a.value("compromised_victim_onion_key", false);
    if (a.contains("substitutes")) {
      for (auto& [host, rec] : a.at("substitutes").items()) {
        caps.substitutes.emplace(host, parse_record(host, rec, Operator::Attacker));
      }
    }
  }

  Sattestation parse_credential(const json& c) {
    const Key& signer = key(c.at("signer").get<std::string>());
    SattestationBody b;
    b.sattestor_domain = c.at("domain").get<std::string>();
    b.sattestor_onion = signer.pair.onion();
    b.refresh_rate_days = c.value("refresh_days", 7.0);
    for (const auto& t : c.at("sattestees")) {
      Binding bind;
      bind.domain = t.at("domain").get<std::string>();
      bind.onion = t.contains("key") ? key(t.at("key").get<std::string>()).pair.onion()
                                     : parse_onion(t.at("onion").get<std::string>());
      bind.labels = t.value("labels", std::vector<std::string>{});
      bind.issued = date_or(t, "issued", today_.plus_days(-30));
      bind.refreshed_on = date_or(t, "refreshed_on", today_.plus_days(-1));
      if (t.contains("onion_reachable")) bind.onion_reachable = t.at("onion_reachable").get<bool>();
      b.sattestees.push_back(std::move(bind));
    }
    return issue(signer.pair, std::move(b));
  }

  SimTime now_;
  Date today_;
  std::map<std::string, Key> keys_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ojson verdict_json(const Verdict& v) {
  return {{"outcome", verdict_name(v.outcome)}, {"detail", v.detail}};
}

ojson trust_json(const std::optional<bool>& t) {
  if (!t) return nullptr;
  return *t ? "trusted" : "not-trusted";
}

ojson chain_json(const std::optional<TrustChain>& c) {
  if (!c) return nullptr;
  ojson links = ojson::array();
  for (const ChainLink& l : c->links) {
    links.push_back({{"sattestor", l.credential.body.sattestor_domain},
                     {"sattestor_onion", l.credential.body.sattestor_onion.label()},
                     {"subject", l.binding().domain},
                     {"label", l.label}});
  }
  return {{"label", c->label}, {"depth", c->depth()}, {"links", links}};
}

}  // namespace

Scenario load_scenario(std::string_view json_text, SimTime now) {
  return Loader(now).load(json_text);
}

Scenario load_scenario_file(const std::filesystem::path& path, SimTime now) {
  std::string text = read_file(path);
  try {
    return load_scenario(text, now);
  } catch (const Error& e) {
    if (e.code() != Errc::BadFixture) throw;
    throw Error(Errc::BadFixture, path.filename().string() + ": " + e.detail());
  }
}

std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir, SimTime now) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw Error(Errc::IoError, "cannot list " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_scenario_file(f, now));
  return out;
}

BrowserConfig parse_browser_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
    BrowserConfig b;
    b.name = j.value("name", std::string("browser"));
    b.sata_aware = j.value("sata_aware", false);
    b.prioritize_onion = j.value("prioritize_onion", true);
    b.use_world_policy = j.value("use_world_policy", false);
    if (j.contains("policy")) b.policy = parse_trust_policy(j.at("policy").dump());
    return b;
  } catch (const json::exception& e) {
    bad(std::string("browser config: ") + e.what());
  }
}

BrowserConfig builtin_browser(std::string_view name) {
  BrowserConfig b;
  b.name = std::string(name);
  if (name == "legacy") return b;
  b.sata_aware = true;
  if (name == "sata-aware") return b;
  b.use_world_policy = true;
  if (name == "sata-aware+policy") return b;
  bad("unknown browser " + std::string(name));
}

std::vector<BrowserConfig> builtin_browsers() {
  return {builtin_browser("legacy"), builtin_browser("sata-aware"),
          builtin_browser("sata-aware+policy")};
}

std::string outcome_to_json(const Outcome& o) {
  ojson verdicts = ojson::array();
  for (const auto& v : o.verdicts) verdicts.push_back(verdict_json(v));
  ojson alt = ojson::array();
  for (const auto& a : o.alt_svc) {
    alt.push_back({{"origin", a.origin},
                   {"alt_host", a.alt_host},
                   {"decision", alt_svc_decision_name(a.decision)},
                   {"reason", a.reason}});
  }
  ojson writes = ojson::array();
  for (const auto& c : o.cache_writes) {
    writes.push_back({{"origin", c.origin}, {"alt_host", c.alt_host}, {"expires", c.expires}});
  }
  ojson j = {{"url", o.url},
             {"reached_endpoint", o.reached_endpoint},
             {"attacker_controlled", o.attacker_controlled},
             {"completed", o.completed},
             {"user_visible_alert", o.user_visible_alert},
             {"via_alt_svc", o.via_alt_svc},
             {"silent_attacker_success", o.silent_attacker_success()},
             {"verdicts", verdicts},
             {"alt_svc", alt},
             {"cache_writes", writes},
             {"contacted", o.contacted},
             {"trust", trust_json(o.trusted)},
             {"trace", o.trace}};
  return j.dump(2);
}

std::string matrix_summary_json(std::span<const MatrixRow> rows) {
  ojson out = ojson::array();
  for (const MatrixRow& r : rows) {
    ojson visits = ojson::array();
    for (const Outcome& o : r.visits) {
      ojson verdicts = ojson::array();
      for (const auto& v : o.verdicts) verdicts.push_back(verdict_name(v.outcome));
      ojson alt = ojson::array();
      for (const auto& a : o.alt_svc) alt.push_back(alt_svc_decision_name(a.decision));
      visits.push_back({{"reached", o.reached_endpoint},
                        {"attacker", o.attacker_controlled},
                        {"alert", o.user_visible_alert},
                        {"via_alt_svc", o.via_alt_svc},
                        {"verdicts", verdicts},
                        {"alt_svc", alt},
                        {"trust", trust_json(o.trusted)}});
    }
    out.push_back({{"scenario", r.scenario},
                   {"browser", r.browser},
                   {"visits", visits},
                   {"final_endpoint", r.final_endpoint()},
                   {"silent_attacker_success", r.silent_attacker_success()}});
  }
  return out.dump(2);
}

std::string tracking_report_to_json(const TrackingReport& report) {
  ojson origins = ojson::array();
  for (const OriginExposure& e : report.origins) {
    ojson entries = ojson::array();
    for (const TrackingEntry& t : e.entries) {
      entries.push_back({{"user", t.user},
                         {"visit", t.visit_index},
                         {"alt_host", t.alt_host},
                         {"served_from_cache", t.served_from_cache}});
    }
    origins.push_back({{"origin", e.origin},
                       {"distinct_alt_hosts", e.distinct_alt_hosts},
                       {"distinguishable", e.distinguishable},
                       {"entries", entries}});
  }
  return ojson{{"origins", origins}}.dump(2);
}

std::string rotation_attack_to_json(const RotationAttackResult& r) {
  ojson j = {{"rotation_ok", r.rotation.ok},
             {"rotation_detail", r.rotation.detail},
             {"new_trust", chain_json(r.new_trust)},
             {"old_trust", chain_json(r.old_trust)},
             {"attack_succeeds", r.attack_succeeds()}};
  return j.dump(2);
}

}  // namespace satakit::sim
