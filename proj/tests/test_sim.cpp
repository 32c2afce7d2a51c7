#include <doctest.h>

#include <nlohmann/json.hpp>

#include "satakit/error.hpp"
#include "satakit/fixture.hpp"
#include "satakit/sim.hpp"
#include "support.hpp"

using namespace satakit;
using namespace satakit::sim;
using nlohmann::json;

namespace {

const SimTime kNow = start_of(test::day("2022-03-01"));

Scenario fixture(const std::string& rel) {
  return load_scenario_file(test::fixtures_path(rel), kNow);
}

std::vector<Outcome> replay(Scenario sc, const BrowserConfig& browser) {
  World w = std::move(sc.world);
  w.browser = browser;
  std::vector<Outcome> out;
  for (const Visit& v : sc.visits) {
    VisitResult r = run_visit(std::move(w), v, kNow + v.offset_s);
    out.push_back(r.outcome);
    w = std::move(r.world);
  }
  return out;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("time helpers") {
  CHECK(date_of(start_of(test::day("2022-03-01"))) == test::day("2022-03-01"));
  CHECK(date_of(start_of(test::day("2022-03-01")) + 86399) == test::day("2022-03-01"));
  CHECK(date_of(start_of(test::day("1970-01-01"))) == test::day("1970-01-01"));
}

TEST_CASE("attack matrix matches the golden table") {
  auto scenarios = load_scenario_dir(test::fixtures_path("attacks"), kNow);
  REQUIRE(scenarios.size() == 3);
  auto browsers = builtin_browsers();
  auto rows = run_matrix(scenarios, browsers, kNow);
  REQUIRE(rows.size() == 9);
  json got = json::parse(matrix_summary_json(rows));
  json want = json::parse(test::slurp(test::data_path("attack_matrix.golden.json")));
  CHECK(got == want);

  for (const MatrixRow& r : rows) {
    CHECK(r.silent_attacker_success() == (r.browser == "legacy"));
  }
}

TEST_CASE("browser configs from files equal the builtins") {
  for (const char* name : {"legacy", "sata-aware", "sata-aware-policy"}) {
    BrowserConfig b = parse_browser_config(
        test::slurp(test::fixtures_path(std::string("browsers/") + name + ".json")));
    BrowserConfig builtin = builtin_browser(b.name);
    CHECK(b.sata_aware == builtin.sata_aware);
    CHECK(b.use_world_policy == builtin.use_world_policy);
    CHECK(b.prioritize_onion == builtin.prioritize_onion);
  }
  CHECK(code_of([] { builtin_browser("netscape"); }) == Errc::BadFixture);
}

TEST_CASE("an attacker with a SATA of its own still fails third-party trust") {
  Scenario sc = fixture("extra/attack2b-onion-location-own-sata.json");
  auto legacy = replay(sc, builtin_browser("legacy"));
  auto aware = replay(sc, builtin_browser("sata-aware"));
  auto policy = replay(sc, builtin_browser("sata-aware+policy"));
  CHECK(legacy.back().silent_attacker_success());
  CHECK(aware.back().silent_attacker_success());
  bool alerted = false;
  for (const Outcome& o : policy) {
    if (o.trusted == std::optional<bool>(false)) {
      alerted = true;
      CHECK(o.user_visible_alert);
    }
    CHECK_FALSE(o.silent_attacker_success());
  }
  CHECK(alerted);
}

TEST_CASE("alt-svc entries expire") {
  Scenario sc = fixture("attacks/attack1-onion-alt-svc.json");
  sc.visits[1].offset_s = 2592000;  // exactly the advertised max-age
  auto later = replay(sc, builtin_browser("legacy"));
  CHECK_FALSE(later[1].via_alt_svc);
  CHECK(later[1].reached_endpoint == "victim-origin");

  sc.visits[1].offset_s = 2592000 - 1;
  auto before = replay(sc, builtin_browser("legacy"));
  CHECK(before[1].via_alt_svc);
  CHECK(before[1].reached_endpoint == "attacker-onion");
}

TEST_CASE("per-user alt-svc is a tracking channel for legacy browsers only") {
  Scenario sc = fixture("tracking/per-user-alt-svc.json");
  World legacy = sc.world;
  legacy.browser = builtin_browser("legacy");
  TrackingReport r = track_alt_svc_exposure(legacy, sc.visits, kNow);
  REQUIRE(r.origins.size() == 1);
  CHECK(r.origins[0].distinguishable);
  CHECK(r.origins[0].distinct_alt_hosts.size() == 2);
  bool cached = false;
  for (const TrackingEntry& e : r.origins[0].entries) cached = cached || e.served_from_cache;
  CHECK(cached);

  World aware = sc.world;
  aware.browser = builtin_browser("sata-aware");
  CHECK(track_alt_svc_exposure(aware, sc.visits, kNow).empty());
  CHECK(json::parse(tracking_report_to_json(track_alt_svc_exposure(aware, sc.visits, kNow))) ==
        json::parse(R"({"origins":[]})"));
}

TEST_CASE("fixtures are checked for consistency") {
  Scenario sc = fixture("attacks/attack1-onion-alt-svc.json");
  CHECK_NOTHROW(sc.world.validate());

  World fp = sc.world;
  fp.sites.at("victim.example").cert->fingerprint = std::string(64, '0');
  CHECK(code_of([&] { fp.validate(); }) == Errc::BadFixture);

  // Attacker infrastructure presenting a header under the victim's key
  // requires the key compromise to be declared.
  World lying = sc.world;
  lying.attacker.substitutes.at("victim.example").headers.sata_header =
      sc.world.sites.at("victim.example").headers.sata_header;
  CHECK(code_of([&] { lying.validate(); }) == Errc::BadFixture);
  lying.attacker.compromised_victim_onion_key = true;
  CHECK_NOTHROW(lying.validate());

  World honest = sc.world;
  honest.sites.at("victim.example").headers.sata_header =
      sc.world.attacker.substitutes.at("victim.example").headers.sata_header;
  CHECK(code_of([&] { honest.validate(); }) == Errc::BadFixture);

  CHECK(code_of([] { load_scenario("{\"name\":", kNow); }) == Errc::BadFixture);
  CHECK(code_of([] { load_scenario_file(test::fixtures_path("missing.json"), kNow); }) ==
        Errc::IoError);
  CHECK(code_of([] {
          load_scenario(R"({"name":"x","sites":{},"visits":[{"url":"https://a.example/"}],
                            "keys":{"k":{"seed_text":"k"}},
                            "credentials":[{"signer":"nobody","domain":"a.example","sattestees":[]}]})",
                        kNow);
        }) == Errc::BadFixture);
}

TEST_CASE("unknown hosts are reported") {
  Scenario sc = fixture("attacks/attack1-onion-alt-svc.json");
  Visit v;
  v.url = "https://nowhere.example/";
  CHECK(code_of([&] { run_visit(sc.world, v, kNow); }) == Errc::UnknownHost);
}

TEST_CASE("a stolen onion key lets the attacker rotate but not inherit trust") {
  Scenario sc = fixture("attacks/attack1-onion-alt-svc.json");
  const Sata victim = make_sata("victim.example", sc.keys.at("victim").onion());
  const Date today = date_of(kNow);
  CHECK(code_of([&] {
          simulate_rotation_attack(sc.world, victim, sc.keys.at("victim"), sc.keys.at("evil"), "news",
                                   today);
        }) == Errc::BadFixture);

  World w = sc.world;
  w.attacker.compromised_victim_onion_key = true;
  RotationAttackResult r =
      simulate_rotation_attack(w, victim, sc.keys.at("victim"), sc.keys.at("evil"), "news", today);
  CHECK(r.rotation.ok);
  CHECK(r.old_trust.has_value());
  CHECK_FALSE(r.new_trust.has_value());
  CHECK_FALSE(r.attack_succeeds());
  json j = json::parse(rotation_attack_to_json(r));
  CHECK(j["attack_succeeds"] == false);
}

TEST_CASE("outcomes serialize with their trace") {
  Scenario sc = fixture("attacks/attack2-onion-location.json");
  auto out = replay(sc, builtin_browser("sata-aware"));
  json j = json::parse(outcome_to_json(out.front()));
  CHECK(j.contains("reached_endpoint"));
  CHECK(j["trace"].is_array());
  CHECK_FALSE(j["trace"].empty());
}
