#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "satakit/bytes.hpp"

namespace satakit {

inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kOnionLabelLength = 56;
inline constexpr std::uint8_t kOnionVersion = 3;
inline constexpr std::string_view kOnionSuffix = ".onion";

using PublicKey = std::array<std::uint8_t, kPublicKeySize>;
using Seed = std::array<std::uint8_t, kSeedSize>;
using Signature = std::array<std::uint8_t, kSignatureSize>;
using OnionChecksum = std::array<std::uint8_t, 2>;

/// A validated v3 onion identity. The label is the 56-character lowercase
/// base32 form of pubkey || checksum || version, without ".onion".
class OnionAddress {
 public:
  /// Empty placeholder; only parse_onion and from_public_key yield valid ones.
  OnionAddress() = default;
  /// Construction from a key always succeeds; the checksum is computed.
  static OnionAddress from_public_key(const PublicKey& pubkey);

  const PublicKey& public_key() const noexcept { return pubkey_; }
  const OnionChecksum& checksum() const noexcept { return checksum_; }
  std::uint8_t version() const noexcept { return version_; }
  const std::string& label() const noexcept { return label_; }
  /// label + ".onion"
  std::string host() const { return label_ + std::string(kOnionSuffix); }

  friend bool operator==(const OnionAddress& a, const OnionAddress& b) noexcept {
    return a.label_ == b.label_;
  }
  friend std::strong_ordering operator<=>(const OnionAddress& a,
                                          const OnionAddress& b) noexcept {
    return a.label_ <=> b.label_;
  }

 private:
  friend OnionAddress parse_onion(std::string_view);

  PublicKey pubkey_{};
  OnionChecksum checksum_{};
  std::uint8_t version_ = kOnionVersion;
  std::string label_;
};

/// First two bytes of SHA3-256(".onion checksum" || pubkey || version).
OnionChecksum onion_checksum(const PublicKey& pubkey,
                             std::uint8_t version = kOnionVersion);

/// Accepts the bare label or label + ".onion", either case. Errors, checked
/// in this order: BadLength, BadAlphabet (with position), BadChecksum,
/// BadVersion.
OnionAddress parse_onion(std::string_view text);

std::string encode_onion(const PublicKey& pubkey);

/// True when `host` ends in ".onion" (case-insensitive).
bool has_onion_suffix(std::string_view host) noexcept;

struct KeyPair {
  Seed secret{};
  PublicKey public_key{};

  OnionAddress onion() const { return OnionAddress::from_public_key(public_key); }
};

/// Deterministic RFC 8032 key expansion of a 32-byte seed.
KeyPair keygen(const Seed& seed);
/// Fresh key from the OpenSSL CSPRNG.
KeyPair keygen();

Seed seed_from_hex(std::string_view hex);
PublicKey public_key_from_hex(std::string_view hex);

Signature sign(const Seed& secret, ByteView message);

/// Throws Error{MalformedSignature} when `signature` is not 64 bytes.
bool verify(const PublicKey& pubkey, ByteView message, ByteView signature);

}  // namespace satakit
