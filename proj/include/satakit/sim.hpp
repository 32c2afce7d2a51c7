#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satakit/credential.hpp"
#include "satakit/trust.hpp"
#include "satakit/validation.hpp"

namespace satakit::sim {

/// Seconds since the Unix epoch; simulated, never read from a clock.
using SimTime = std::int64_t;

inline constexpr std::int64_t kDefaultAltSvcMaxAge = 86400;

SimTime start_of(Date day) noexcept;
Date date_of(SimTime t) noexcept;

enum class Operator { Honest, Attacker };

struct AltSvcHeader {
  std::string host;
  std::int64_t max_age_s = kDefaultAltSvcMaxAge;
  /// Per-user alternative hosts (tracking); falls back to `host`.
  std::map<std::string, std::string> per_user;

  const std::string& host_for(const std::string& user) const;
};

struct SiteHeaders {
  std::optional<std::string> onion_location;
  std::optional<AltSvcHeader> alt_svc;
  std::optional<Sattestation> sata_header;
};

struct SiteRecord {
  std::string endpoint_id;
  Operator operated_by = Operator::Honest;
  std::optional<CertDescriptor> cert;
  SiteHeaders headers;
  /// Ruleset entries published by this record: hostname -> onion label.
  std::map<std::string, std::string> he_rules;
};

struct AttackerCaps {
  std::set<std::string> rogue_cert_for;
  std::set<std::string> dns_hijack;
  /// Domains the attacker registered itself; CA-valid certs are routine.
  std::set<std::string> owned_domains;
  bool ruleset_control = false;
  std::set<OnionAddress> onion_keys;
  bool compromised_victim_onion_key = false;
  /// Servers that answer for a hostname when it is hijacked.
  std::map<std::string, SiteRecord> substitutes;
};

struct AltSvcEntry {
  std::string alt_host;
  SimTime expires = 0;
};

struct BrowserConfig {
  std::string name = "browser";
  bool sata_aware = false;
  std::optional<TrustPolicy> policy;
  /// Use the world's trust setup when `policy` is unset.
  bool use_world_policy = false;
  bool prioritize_onion = true;
  std::map<std::string, AltSvcEntry> alt_svc_cache;
};

struct World {
  std::map<std::string, SiteRecord> sites;
  AttackerCaps attacker;
  BrowserConfig browser;
  /// Third-party sattestations known to the browser.
  std::vector<Sattestation> credentials;
  std::optional<TrustPolicy> policy;

  const TrustPolicy* effective_policy() const;
  /// Throws Error{BadFixture} when a record is internally inconsistent or the
  /// attacker holds an honest onion key without compromised_victim_onion_key.
  void validate() const;
};

struct Visit {
  std::string url;
  std::int64_t offset_s = 0;
  /// False once the attacker's DNS hijack window has closed.
  bool hijack = true;
  std::string user = "user";
};

struct AltSvcEvent {
  std::string origin;
  std::string alt_host;
  AltSvcDecision decision = AltSvcDecision::Block;
  std::string reason;
};

struct CacheWrite {
  std::string origin;
  std::string alt_host;
  SimTime expires = 0;
};

struct Outcome {
  std::string url;
  std::string reached_endpoint = "none";
  bool attacker_controlled = false;
  bool completed = false;
  bool user_visible_alert = false;
  bool via_alt_svc = false;
  std::vector<Verdict> verdicts;
  std::vector<AltSvcEvent> alt_svc;
  std::vector<CacheWrite> cache_writes;
  std::vector<std::string> contacted;
  std::vector<std::string> trace;
  /// Set when a policy required third-party trust for the connected SATA.
  std::optional<bool> trusted;

  bool silent_attacker_success() const noexcept {
    return attacker_controlled && !user_visible_alert;
  }
};

struct VisitResult {
  Outcome outcome;
  World world;
};

/// One navigation: ruleset rewrite, alt-svc cache, connection, header
/// processing, SATA validation (sata_aware), trust (policy), then any
/// onion-location redirect. Throws Error{UnknownHost}.
VisitResult run_visit(World world, const Visit& visit, SimTime at);

struct Scenario {
  std::string name;
  std::string description;
  World world;
  std::vector<Visit> visits;
  std::map<std::string, KeyPair> keys;
};

struct MatrixRow {
  std::string scenario;
  std::string browser;
  std::vector<Outcome> visits;

  const std::string& final_endpoint() const;
  bool silent_attacker_success() const;
};

/// Scenario-major cross product; each row replays the scenario's visits in
/// order against a fresh copy of its world using that browser.
std::vector<MatrixRow> run_matrix(std::span<const Scenario> scenarios,
                                  std::span<const BrowserConfig> browsers, SimTime now);

struct TrackingEntry {
  std::string user;
  std::size_t visit_index = 0;
  std::string alt_host;
  bool served_from_cache = false;
};

struct OriginExposure {
  std::string origin;
  std::vector<TrackingEntry> entries;
  std::set<std::string> distinct_alt_hosts;
  /// Different users hold different cached alternatives.
  bool distinguishable = false;
};

struct TrackingReport {
  std::vector<OriginExposure> origins;
  bool empty() const noexcept { return origins.empty(); }
};

/// Replays `visits` (ordered by offset) with one browser cache per user and
/// reports, per origin, the visits that wrote or used a cached alternative.
TrackingReport track_alt_svc_exposure(const World& world, std::span<const Visit> visits,
                                      SimTime now);

struct RotationAttackResult {
  RotationResult rotation;
  std::optional<TrustChain> new_trust;
  std::optional<TrustChain> old_trust;

  bool attack_succeeds() const noexcept { return rotation.ok && new_trust.has_value(); }
};

/// An attacker holding the victim's onion key rotates the victim SATA to a
/// key of its own. Throws Error{BadFixture} unless
/// world.attacker.compromised_victim_onion_key.
RotationAttackResult simulate_rotation_attack(const World& world, const Sata& victim,
                                              const KeyPair& stolen_key,
                                              const KeyPair& attacker_key,
                                              std::string_view label, Date now);

}  // namespace satakit::sim
