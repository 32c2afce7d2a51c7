#include <doctest.h>

#include <random>

#include "satakit/base32.hpp"
#include "satakit/digest.hpp"
#include "satakit/error.hpp"
#include "satakit/onion.hpp"
#include "support.hpp"

using namespace satakit;

namespace {

Errc code_of(std::string_view label) {
  try {
    parse_onion(label);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parse_onion accepted " << label);
  return Errc::ParseError;
}

constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz234567";

}  // namespace

TEST_CASE("base32 RFC 4648 vectors, lowercase and unpadded") {
  const std::pair<const char*, const char*> vectors[] = {
      {"", ""},           {"f", "my"},         {"fo", "mzxq"},         {"foo", "mzxw6"},
      {"foob", "mzxw6yq"}, {"fooba", "mzxw6ytb"}, {"foobar", "mzxw6ytboi"},
  };
  for (auto [plain, encoded] : vectors) {
    CHECK(base32::encode(as_bytes(plain)) == encoded);
    Bytes back = base32::decode(encoded);
    CHECK(std::string(back.begin(), back.end()) == plain);
  }
}

TEST_CASE("base32 rejects characters outside the alphabet with their position") {
  try {
    base32::decode("mzx1w6");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadAlphabet);
    CHECK(e.position() == std::optional<std::size_t>(3));
  }
  CHECK_THROWS_AS(base32::decode("mz"), Error);  // non-zero trailing bits
}

TEST_CASE("digests") {
  CHECK(to_hex(sha256(as_bytes("abc")), HexCase::Upper) ==
        "BA7816BF8F01CFEA414140DE5DAE2223B00361A396177A9CB410FF61F20015AD");
  CHECK(to_hex(sha3_256(as_bytes(""))) ==
        "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
}

TEST_CASE("ed25519 RFC 8032 test 1") {
  KeyPair k = keygen(seed_from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60"));
  CHECK(to_hex(k.public_key) == "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  Signature sig = sign(k.secret, {});
  CHECK(to_hex(sig) ==
        "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  CHECK(verify(k.public_key, {}, sig));
  sig[5] ^= 0x01;
  CHECK_FALSE(verify(k.public_key, {}, sig));
  Bytes short_sig(63, 0);
  CHECK_THROWS_AS(verify(k.public_key, {}, short_sig), Error);
}

TEST_CASE("oracle vectors for printed addresses") {
  struct Vec {
    const char* label;
    const char* pubkey;
    const char* checksum;
  };
  const Vec vecs[] = {
      {"facebookwkhpilnemxj7asaniu7vnjjbiltxjqhye3mhbshg7kx5tfyd",
       "280440b9cab28ef42da465d3f0480d453f56a52142e774c0f826d870c8e6faaf", "d997"},
      {"ixxuq4b4bsr3aggbokovydiiys7rolq4ewqjva67qfpmp3y55jsxi5yd",
       "45ef48703c0ca3b018c1729d5c0d08c4bf172e1c25a09a83df815ec7ef1dea65", "7477"},
      {"sik5nlgfc5qylnnsr57qrbm64zbdx6t4lreyhpon3ychmxmiem7tioad",
       "9215d6acc5176185b5b28f7f08859ee6423bfa7c5c4983bdcdde04765d88233f", "3438"},
  };
  for (const Vec& v : vecs) {
    OnionAddress a = parse_onion(v.label);
    CHECK(to_hex(a.public_key()) == v.pubkey);
    CHECK(to_hex(a.checksum()) == v.checksum);
    CHECK(a.version() == 3);
    CHECK(encode_onion(a.public_key()) == v.label);
  }
  CHECK(encode_onion(PublicKey{}) == "aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaam2dqd");
  CHECK(to_hex(keygen(Seed{}).public_key) ==
        "3b6a27bcceb6a42d62a3a8d02a6f0d73653215771de243a63ac048a18b59da29");
  CHECK_NOTHROW(parse_onion("hmfakusaluamq46u43uncnedmcpsjks46en77mzbzb32x3en3gpkh3ad"));
}

TEST_CASE("the SecureDrop address as printed is one character too long") {
  CHECK(code_of("gppg43zz5d2yfuom3yfmxnnokn3zj4mekt55onlng3zs653aty4fio6qd") == Errc::BadLength);
  CHECK_NOTHROW(parse_onion("gppg43zz5d2yfuom3yfmxnnokn3zj4mekt55onlng3zs653ty4fio6qd"));
}

TEST_CASE("suffix and case handling") {
  const std::string label = "facebookwkhpilnemxj7asaniu7vnjjbiltxjqhye3mhbshg7kx5tfyd";
  OnionAddress a = parse_onion("FACEBOOKwkhpilnemxj7asaniu7vnjjbiltxjqhye3mhbshg7kx5tfyd.ONION");
  CHECK(a.label() == label);
  CHECK(a.host() == label + ".onion");
  CHECK(has_onion_suffix("x.Onion"));
  CHECK_FALSE(has_onion_suffix("onion"));
}

TEST_CASE("error classes in parse order") {
  CHECK(code_of("abc") == Errc::BadLength);
  CHECK(code_of("") == Errc::BadLength);

  const std::string good = test::named_key("sattestora.info").onion().label();
  std::string bad_char = good;
  bad_char[10] = '1';
  try {
    parse_onion(bad_char);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadAlphabet);
    CHECK(e.position() == std::optional<std::size_t>(10));
  }

  // Well-formed but version 4, with the checksum computed over version 4.
  PublicKey pk = test::named_key("v4").public_key;
  OnionChecksum sum = onion_checksum(pk, 4);
  Bytes raw(pk.begin(), pk.end());
  raw.push_back(sum[0]);
  raw.push_back(sum[1]);
  raw.push_back(4);
  CHECK(code_of(base32::encode(raw)) == Errc::BadVersion);

  // Version 4 byte under a version-3 checksum: the checksum fails first.
  OnionChecksum sum3 = onion_checksum(pk);
  raw[32] = sum3[0];
  raw[33] = sum3[1];
  CHECK(code_of(base32::encode(raw)) == Errc::BadChecksum);
}

TEST_CASE("property: encode/parse roundtrip over 1000 random keys") {
  std::mt19937_64 rng(0x5a7a);
  for (int i = 0; i < 1000; ++i) {
    Seed seed{};
    for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
    KeyPair k = keygen(seed);
    const std::string label = encode_onion(k.public_key);
    REQUIRE(label.size() == kOnionLabelLength);
    OnionAddress a = parse_onion(label);
    CHECK(a.public_key() == k.public_key);
    CHECK(a.label() == label);
    CHECK(encode_onion(a.public_key()) == label);
  }
}

TEST_CASE("property: every single-character change of a label is rejected") {
  const std::string good = test::named_key("domain1.info").onion().label();
  const std::string extra = "0189!-.";
  std::size_t mutations = 0;
  for (std::size_t pos = 0; pos < good.size(); ++pos) {
    for (char c : kAlphabet) {
      if (c == good[pos]) continue;
      std::string m = good;
      m[pos] = c;
      Errc e = code_of(m);
      CHECK((e == Errc::BadChecksum || e == Errc::BadAlphabet));
      ++mutations;
    }
    for (char c : extra) {
      std::string m = good;
      m[pos] = c;
      CHECK(code_of(m) == Errc::BadAlphabet);
    }
  }
  CHECK(mutations == good.size() * 31);
}
