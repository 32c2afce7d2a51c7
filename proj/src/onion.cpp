#include "satakit/onion.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cctype>
#include <memory>

#include "satakit/base32.hpp"
#include "satakit/digest.hpp"
#include "satakit/error.hpp"

namespace satakit {
namespace {

constexpr std::string_view kChecksumPrefix = ".onion checksum";
constexpr std::size_t kDecodedLength = kPublicKeySize + 2 + 1;

struct PkeyFree {
  void operator()(EVP_PKEY* p) const noexcept { EVP_PKEY_free(p); }
};
struct MdCtxFree {
  void operator()(EVP_MD_CTX* c) const noexcept { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyFree>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;

PkeyPtr private_key(const Seed& seed) {
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                           seed.data(), seed.size()));
  if (!key) throw Error(Errc::MalformedKey, "OpenSSL rejected ed25519 seed");
  return key;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

OnionChecksum onion_checksum(const PublicKey& pubkey, std::uint8_t version) {
  Bytes input(kChecksumPrefix.begin(), kChecksumPrefix.end());
  input.insert(input.end(), pubkey.begin(), pubkey.end());
  input.push_back(version);
  Digest256 h = sha3_256(input);
  return {h[0], h[1]};
}

std::string encode_onion(const PublicKey& pubkey) {
  auto cs = onion_checksum(pubkey);
  Bytes raw(pubkey.begin(), pubkey.end());
  raw.push_back(cs[0]);
  raw.push_back(cs[1]);
  raw.push_back(kOnionVersion);
  return base32::encode(raw);
}

OnionAddress OnionAddress::from_public_key(const PublicKey& pubkey) {
  OnionAddress a;
  a.pubkey_ = pubkey;
  a.checksum_ = onion_checksum(pubkey);
  a.version_ = kOnionVersion;
  a.label_ = encode_onion(pubkey);
  return a;
}

bool has_onion_suffix(std::string_view host) noexcept {
  if (host.size() < kOnionSuffix.size()) return false;
  auto tail = host.substr(host.size() - kOnionSuffix.size());
  return std::equal(tail.begin(), tail.end(), kOnionSuffix.begin(),
                    [](char a, char b) {
                      return std::tolower(static_cast<unsigned char>(a)) == b;
                    });
}

OnionAddress parse_onion(std::string_view text) {
  std::string label = lowercase(text);
  if (has_onion_suffix(label)) {
    label.resize(label.size() - kOnionSuffix.size());
  }
  if (label.size() != kOnionLabelLength) {
    throw Error(Errc::BadLength, "onion label must be 56 characters, got " +
                                     std::to_string(label.size()));
  }
  Bytes raw = base32::decode(label);
  if (raw.size() != kDecodedLength) {
    throw Error(Errc::BadLength, "decoded onion address is not 35 bytes");
  }

  OnionAddress a;
  std::copy_n(raw.begin(), kPublicKeySize, a.pubkey_.begin());
  a.checksum_ = {raw[32], raw[33]};
  a.version_ = raw[34];
  if (onion_checksum(a.pubkey_, a.version_) != a.checksum_) {
    throw Error(Errc::BadChecksum, "checksum does not match public key");
  }
  if (a.version_ != kOnionVersion) {
    throw Error(Errc::BadVersion,
                "version byte is " + std::to_string(a.version_) + ", expected 3",
                kOnionLabelLength - 1);
  }
  a.label_ = std::move(label);
  return a;
}

KeyPair keygen(const Seed& seed) {
  PkeyPtr key = private_key(seed);
  KeyPair kp;
  kp.secret = seed;
  std::size_t len = kp.public_key.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), kp.public_key.data(), &len) != 1 ||
      len != kPublicKeySize) {
    throw Error(Errc::MalformedKey, "could not derive ed25519 public key");
  }
  return kp;
}

KeyPair keygen() {
  Seed seed{};
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("OpenSSL RAND_bytes failed");
  }
  return keygen(seed);
}

Seed seed_from_hex(std::string_view hex) {
  Bytes b = from_hex(hex);
  if (b.size() != kSeedSize) {
    throw Error(Errc::MalformedKey, "seed must be 32 bytes");
  }
  Seed s{};
  std::copy(b.begin(), b.end(), s.begin());
  return s;
}

PublicKey public_key_from_hex(std::string_view hex) {
  Bytes b = from_hex(hex);
  if (b.size() != kPublicKeySize) {
    throw Error(Errc::MalformedKey, "public key must be 32 bytes");
  }
  PublicKey k{};
  std::copy(b.begin(), b.end(), k.begin());
  return k;
}

Signature sign(const Seed& secret, ByteView message) {
  PkeyPtr key = private_key(secret);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  Signature sig{};
  std::size_t len = sig.size();
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1 ||
      EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1 ||
      len != kSignatureSize) {
    throw std::runtime_error("OpenSSL ed25519 signing failed");
  }
  return sig;
}

bool verify(const PublicKey& pubkey, ByteView message, ByteView signature) {
  if (signature.size() != kSignatureSize) {
    throw Error(Errc::MalformedSignature,
                "signature must be 64 bytes, got " + std::to_string(signature.size()));
  }
  PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                          pubkey.data(), pubkey.size()));
  if (!key) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

}  // namespace satakit
