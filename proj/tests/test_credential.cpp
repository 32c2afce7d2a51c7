#include <doctest.h>

#include <random>

#include "satakit/credential.hpp"
#include "satakit/error.hpp"
#include "support.hpp"

using namespace satakit;
using test::day;

namespace {

Sattestation reference_self() {
  return make_self_sattestation(test::named_key("sattestora.info"), "sattestora.info",
                                {test::kFp1, test::kFp2}, {"news"}, day("2020-06-01"),
                                day("2020-08-25"), 7);
}

bool same(const Sattestation& a, const Sattestation& b) {
  return to_transport(a) == to_transport(b);
}

std::optional<Errc> issue_code(SattestationBody body) {
  try {
    KeyPair key = test::named_key(body.sattestor_domain);
    issue(key, std::move(body));
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("canonical body matches the oracle byte for byte") {
  Bytes canon = canonical_bytes(test::two_binding_body());
  CHECK(std::string(canon.begin(), canon.end()) == test::slurp(test::data_path("two_binding_body.golden")));
  CHECK(canon.size() == 525);
}

TEST_CASE("signed transport matches the oracle") {
  Sattestation s = issue(test::named_key("sattestora.info"), test::two_binding_body());
  CHECK(to_transport(s) == test::slurp(test::data_path("two_binding.satt")));
  CHECK(transport_size(s) == 668);
  CHECK(verify_credential(s).is_ok());
  CHECK_FALSE(s.is_self_sattestation());
}

TEST_CASE("self-sattestation size bound") {
  Sattestation s = reference_self();
  CHECK(to_transport(s) == test::slurp(test::data_path("self_sattestation.satt")));
  CHECK(transport_size(s) == 666);
  CHECK(transport_size(s) < kSelfSattestationMaxBytes);
  CHECK(s.is_self_sattestation());

  // Each extra fingerprint costs 67 bytes: the fourth lands exactly on 800.
  KeyPair k = test::named_key("sattestora.info");
  std::vector<std::string> three = {test::kFp1, test::kFp2, std::string(64, 'A')};
  CHECK(transport_size(make_self_sattestation(k, "sattestora.info", three, {"news"},
                                              day("2020-06-01"), day("2020-08-25"), 7)) == 733);
  std::vector<std::string> four = three;
  four.push_back(std::string(64, 'B'));
  try {
    make_self_sattestation(k, "sattestora.info", four, {"news"}, day("2020-06-01"),
                           day("2020-08-25"), 7);
    FAIL("accepted an 800-byte self-sattestation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooLarge);
  }
  CHECK_THROWS_AS(make_self_sattestation(k, "sattestora.info", {}, {"news"}, day("2020-06-01"),
                                         day("2020-08-25"), 7),
                  Error);
}

TEST_CASE("fingerprints are normalised to uppercase") {
  std::string lower = test::kFp1;
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  Sattestation s = make_self_sattestation(test::named_key("sattestora.info"), "sattestora.info",
                                          {lower, test::kFp2}, {"news"}, day("2020-06-01"),
                                          day("2020-08-25"), 7);
  CHECK(same(s, reference_self()));
}

TEST_CASE("parse and serialise are inverse") {
  const std::string wire = test::slurp(test::data_path("two_binding.satt"));
  Sattestation s = parse_sattestation(wire);
  CHECK(to_transport(s) == wire);
  CHECK(s.body.sattestees.size() == 2);
  CHECK(s.body.sattestees[1].labels == std::vector<std::string>{"union"});
  CHECK(verify_credential(s).is_ok());

  std::vector<Sattestation> list = {s, reference_self()};
  std::vector<Sattestation> back = parse_wellknown(to_wellknown(list));
  REQUIRE(back.size() == 2);
  CHECK(same(back[0], list[0]));
  CHECK(same(back[1], list[1]));
}

TEST_CASE("optional fields appear only when set") {
  SattestationBody body = test::two_binding_body();
  body.sattestees[0].labels.clear();
  body.sattestees[1].onion_reachable = true;
  Bytes canon = canonical_bytes(body);
  std::string text(canon.begin(), canon.end());
  CHECK(text.find("\"labels\":\"union\",\"issued\"") != std::string::npos);
  CHECK(text.find("\"refreshed_on\":\"2020-08-25\",\"onion_reachable\":true}") != std::string::npos);
  CHECK(text.find("cert_fingerprint") == std::string::npos);
  Sattestation s = issue(test::named_key("sattestora.info"), body);
  CHECK(same(parse_sattestation(to_transport(s)), s));
}

TEST_CASE("refresh rate wire form") {
  CHECK(format_refresh_rate(7) == "7 days");
  CHECK(format_refresh_rate(3.5) == "3.5 days");
  CHECK(parse_refresh_rate("7 days") == 7);
  CHECK(parse_refresh_rate("3.5 days") == 3.5);
  CHECK_THROWS_AS(format_refresh_rate(0), Error);
  CHECK_THROWS_AS(parse_refresh_rate("a week"), Error);
}

TEST_CASE("structural rules") {
  SattestationBody b = test::two_binding_body();
  b.sattestees[0].cert_fingerprints = {test::kFp1};
  CHECK(issue_code(b) == Errc::StructuralViolation);

  b = test::two_binding_body();
  b.sattestees[0].labels = {"news", "news"};
  CHECK(issue_code(b) == Errc::StructuralViolation);

  b = test::two_binding_body();
  b.sattestees[0].refreshed_on = day("2020-05-01");
  CHECK(issue_code(b) == Errc::StructuralViolation);

  b = test::two_binding_body();
  b.version = 2;
  CHECK(issue_code(b) == Errc::StructuralViolation);

  b = test::two_binding_body();
  b.sattestees.clear();
  CHECK(issue_code(b) == Errc::StructuralViolation);

  b = test::two_binding_body();
  b.sattestees[1].domain = "Domain2.info";
  CHECK(issue_code(b) == Errc::StructuralViolation);

  b = test::two_binding_body();
  b.refresh_rate_days = -1;
  CHECK(issue_code(b) == Errc::StructuralViolation);

  b = test::two_binding_body();
  CHECK_THROWS_AS(issue(test::named_key("domain1.info"), b), Error);
  try {
    issue(test::named_key("domain1.info"), b);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::KeyMismatch);
  }
}

TEST_CASE("self form without fingerprints is allowed only as a rotation pointer") {
  KeyPair k = test::named_key("sattestora.info");
  SattestationBody b;
  b.sattestor_domain = "sattestora.info";
  b.sattestor_onion = k.onion();
  b.sattestees.push_back(
      test::make_binding("sattestora.info", k.onion(), {"news"}, "2020-06-01", "2020-06-01"));
  CHECK(issue_code(b) == Errc::StructuralViolation);
  Sata next = make_sata("sattestora.info", test::named_key("next").onion());
  b.sattestees[0].labels = {"sattestor({" + to_subdomain_form(next) + "})"};
  CHECK(issue_code(b) == std::nullopt);
}

TEST_CASE("parse errors carry their class") {
  auto code_of = [](const std::string& text) {
    try {
      parse_sattestation(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  const std::string wire = test::slurp(test::data_path("two_binding.satt"));
  CHECK(code_of("{not json") == Errc::ParseError);
  CHECK(code_of("{}") == Errc::ParseError);
  std::string short_sig = wire;
  short_sig.replace(short_sig.find("\"signature\":\"") + 13, 2, "");
  CHECK(code_of(short_sig) == Errc::MalformedSignature);
  std::string bad_onion = wire;
  bad_onion.replace(bad_onion.find("hb4gcbgp"), 1, "1");
  CHECK(code_of(bad_onion) == Errc::UnrepresentableField);
}

TEST_CASE("property: random sign/verify and byte mutations") {
  std::mt19937 rng(20200825);
  const std::string printable =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789{}[]\":,.-_ ";
  KeyPair k = test::named_key("sattestora.info");
  Sattestation base = issue(k, test::two_binding_body());
  const std::string wire = to_transport(base);
  int rejected = 0;
  for (int i = 0; i < 200; ++i) {
    std::string m = wire;
    std::size_t pos = rng() % m.size();
    char c;
    do {
      c = printable[rng() % printable.size()];
    } while (c == m[pos]);
    m[pos] = c;
    bool accepted = false;
    try {
      Sattestation s = parse_sattestation(m);
      accepted = verify_credential(s).is_ok();
      if (accepted) CHECK_MESSAGE(same(s, base), "mutation at " << pos << " accepted: " << m);
    } catch (const Error&) {
    }
    rejected += accepted ? 0 : 1;
  }
  CHECK(rejected >= 190);

  for (int i = 0; i < 200; ++i) {
    Seed seed{};
    for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
    KeyPair key = keygen(seed);
    Sattestation s = make_self_sattestation(key, "site" + std::to_string(i) + ".example",
                                            {test::kFp1}, {"l" + std::to_string(i % 7)},
                                            day("2021-01-01"), day("2021-01-02"), 7);
    CHECK(verify_credential(s).is_ok());
    Sattestation t = s;
    t.signature[rng() % t.signature.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    CHECK(verify_credential(t).code() == std::optional<Errc>(Errc::BadSignature));
  }
}

TEST_CASE("freshness boundaries") {
  Sattestation s = reference_self();  // refreshed 2020-08-25, rate 7 days
  CHECK(check_freshness(s, 0, day("2020-08-25")).fresh);
  CHECK(check_freshness(s, 0, day("2020-08-31")).fresh);
  Freshness edge = check_freshness(s, 0, day("2020-09-01"));
  CHECK_FALSE(edge.fresh);
  CHECK(edge.age_days == 7);
  CHECK(edge.margin_days() == 0);
  CHECK(edge.status().code() == std::optional<Errc>(Errc::Stale));
  CHECK(check_freshness(s, 0, day("2020-08-19")).fresh);
  CHECK_FALSE(check_freshness(s, 0, day("2020-08-18")).fresh);
  CHECK_THROWS_AS(check_freshness(s, 1, day("2020-08-25")), Error);

  KeyPair k = test::named_key("sattestora.info");
  Sattestation half = make_self_sattestation(k, "sattestora.info", {test::kFp1}, {"news"},
                                             day("2020-08-01"), day("2020-08-25"), 3.5);
  CHECK(check_freshness(half, 0, day("2020-08-28")).fresh);
  CHECK_FALSE(check_freshness(half, 0, day("2020-08-29")).fresh);
}
