#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satakit/credential.hpp"
#include "satakit/date.hpp"
#include "satakit/sata.hpp"

namespace satakit {

inline constexpr int kDefaultMaxChainDepth = 3;

struct TrustRoot {
  Sata sattestor;
  /// Labels whose sattestations by this root are trusted. A delegation label
  /// "sattestor(X)" lets the root hand out authority over X.
  std::set<std::string> trusted_labels;
};

struct TrustPolicy {
  std::vector<TrustRoot> roots;
  int max_chain_depth = kDefaultMaxChainDepth;
  /// A SATA connection under this policy must be trusted for at least one of
  /// these labels. Empty means no third-party requirement.
  std::set<std::string> require_sattestation_for;

  /// Throws Error{StructuralViolation}.
  void validate() const;
};

/// Policy file: {"roots":[{"sattestor":"<sata url>","labels":[...]}],
/// "max_chain_depth":3,"require_sattestation_for":[...]}
TrustPolicy parse_trust_policy(std::string_view json);
std::string to_json(const TrustPolicy& policy);

/// "sattestor(" + scope + ")" -> scope
std::optional<std::string> delegation_scope(std::string_view label);
std::string delegation_label(std::string_view scope);
/// "sattestor({<subdomain form of new>})"
std::string rotation_pointer_label(const Sata& new_sata);

struct ChainLink {
  Sattestation credential;
  std::size_t credential_index = 0;
  std::size_t binding_index = 0;
  std::string label;

  const Binding& binding() const { return credential.body.sattestees.at(binding_index); }
};

struct TrustChain {
  std::vector<ChainLink> links;
  Sata subject;
  std::string label;

  std::size_t depth() const noexcept { return links.size(); }
};

/// Shortest chain from a policy root to (subject, label), ties broken by the
/// lexicographic sequence of sattestor (domain, onion) along the chain and
/// then by credential position. Credentials failing verify_credential, and
/// bindings that are not fresh at `now`, are skipped. nullopt = NotTrusted.
std::optional<TrustChain> evaluate(const TrustPolicy& policy,
                                   std::span<const Sattestation> credentials,
                                   const Sata& subject, std::string_view label, Date now);

/// Trust for a SATA that changed keys is never inherited: this is evaluate()
/// on `new_sata`, and third-party sattestations naming `old_sata` never count.
std::optional<TrustChain> evaluate_trust_propagation_after_rotation(
    const TrustPolicy& policy, std::span<const Sattestation> credentials,
    const Sata& old_sata, const Sata& new_sata, std::string_view label, Date now);

struct RequiredTrust {
  bool required = false;
  std::optional<TrustChain> chain;

  bool satisfied() const noexcept { return !required || chain.has_value(); }
};

/// Checks `subject` against policy.require_sattestation_for; the first
/// satisfied label (in set order) wins.
RequiredTrust required_trust(const TrustPolicy& policy,
                             std::span<const Sattestation> credentials,
                             const Sata& subject, Date now);

struct RotationResult {
  bool ok = false;
  std::string detail;
};

/// RotationOk iff valid, fresh credentials exist in both directions:
/// old sattesting new and new sattesting old. Throws Error{DomainMismatch}
/// when the domains differ.
RotationResult rotation_check(const Sata& old_sata, const Sata& new_sata,
                              std::span<const Sattestation> credentials, Date now);

/// Self-sattestation for `old_sata` whose only label points at `new_sata`.
/// Throws Error{KeyMismatch} when `key` is not old's key.
Sattestation expired_rotation_form(const Sata& old_sata, const Sata& new_sata,
                                   const KeyPair& key, Date issued,
                                   double refresh_rate_days = 3.5);

/// Credentials from `sattestor` binding `subject`, valid and fresh at `now`.
bool has_fresh_binding(std::span<const Sattestation> credentials, const Sata& sattestor,
                       const Sata& subject, Date now);

}  // namespace satakit
