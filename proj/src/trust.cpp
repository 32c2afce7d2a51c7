#include "satakit/trust.hpp"

#include <map>
#include <tuple>

#include <nlohmann/json.hpp>

#include "satakit/error.hpp"
#include "satakit/url.hpp"

namespace satakit {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kDelegationOpen = "sattestor(";

using NodeId = std::pair<std::string, std::string>;  // (domain, onion label)

NodeId node_of(const Sata& s) { return {s.domain, s.onion.label()}; }
NodeId sattestor_of(const Sattestation& c) {
  return {c.body.sattestor_domain, c.body.sattestor_onion.label()};
}
NodeId node_of(const Binding& b) { return {b.domain, b.onion.label()}; }

struct Step {
  std::size_t credential;
  std::size_t binding;
  std::string label;
};

// Sattestor names along the chain decide ties; positions only break the rest.
struct Partial {
  std::vector<Step> steps;
  std::vector<std::pair<std::string, std::string>> names;
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> positions;

  auto key() const { return std::tie(names, positions); }
};

Partial extend(const Partial& p, std::span<const Sattestation> creds, Step step) {
  Partial out = p;
  const auto& body = creds[step.credential].body;
  out.names.emplace_back(body.sattestor_domain, body.sattestor_onion.label());
  out.positions.emplace_back(step.credential, step.binding, step.label);
  out.steps.push_back(std::move(step));
  return out;
}

void keep_min(std::optional<Partial>& slot, Partial candidate) {
  if (!slot || candidate.key() < slot->key()) slot = std::move(candidate);
}

/// Authority carried into the next hop by a label: "sattestor(X)" grants X
/// and lets the holder re-delegate X; any other label grants nothing.
std::set<std::string> authority_from(const std::string& label) {
  if (auto scope = delegation_scope(label)) return {*scope, label};
  return {};
}

struct Usable {
  std::vector<bool> valid;
  std::vector<std::vector<bool>> fresh;
  std::multimap<NodeId, std::size_t> by_sattestor;
};

Usable prepare(std::span<const Sattestation> creds, Date now) {
  Usable u;
  u.valid.resize(creds.size());
  u.fresh.resize(creds.size());
  for (std::size_t i = 0; i < creds.size(); ++i) {
    u.valid[i] = verify_credential(creds[i]).is_ok();
    if (!u.valid[i]) continue;
    for (std::size_t b = 0; b < creds[i].body.sattestees.size(); ++b) {
      u.fresh[i].push_back(check_freshness(creds[i], b, now).fresh);
    }
    u.by_sattestor.emplace(sattestor_of(creds[i]), i);
  }
  return u;
}

}  // namespace

void TrustPolicy::validate() const {
  if (max_chain_depth < 1) {
    throw Error(Errc::StructuralViolation, "max_chain_depth must be at least 1");
  }
  for (const auto& r : roots) {
    if (!is_valid_domain(r.sattestor.domain)) {
      throw Error(Errc::StructuralViolation, "root sattestor domain is invalid");
    }
  }
}

std::optional<std::string> delegation_scope(std::string_view label) {
  if (label.size() <= kDelegationOpen.size() + 1 ||
      label.substr(0, kDelegationOpen.size()) != kDelegationOpen || label.back() != ')') {
    return std::nullopt;
  }
  return std::string(label.substr(kDelegationOpen.size(),
                                  label.size() - kDelegationOpen.size() - 1));
}

std::string delegation_label(std::string_view scope) {
  return std::string(kDelegationOpen) + std::string(scope) + ")";
}

std::string rotation_pointer_label(const Sata& new_sata) {
  return delegation_label("{" + to_subdomain_form(new_sata) + "}");
}

std::optional<TrustChain> evaluate(const TrustPolicy& policy,
                                   std::span<const Sattestation> credentials,
                                   const Sata& subject, std::string_view label, Date now) {
  policy.validate();
  const Usable usable = prepare(credentials, now);
  const NodeId target = node_of(subject);

  using State = std::pair<NodeId, std::set<std::string>>;
  std::map<State, std::optional<Partial>> frontier;
  for (const auto& root : policy.roots) {
    keep_min(frontier[{node_of(root.sattestor), root.trusted_labels}], Partial{});
  }

  for (int depth = 1; depth <= policy.max_chain_depth && !frontier.empty(); ++depth) {
    std::map<State, std::optional<Partial>> next;
    std::optional<Partial> best;
    for (const auto& [state, partial] : frontier) {
      const auto& [node, authority] = state;
      auto [lo, hi] = usable.by_sattestor.equal_range(node);
      for (auto it = lo; it != hi; ++it) {
        const std::size_t c = it->second;
        const auto& sattestees = credentials[c].body.sattestees;
        for (std::size_t b = 0; b < sattestees.size(); ++b) {
          if (!usable.fresh[c][b]) continue;
          const Binding& binding = sattestees[b];
          std::set<std::string> labels(binding.labels.begin(), binding.labels.end());
          for (const std::string& l : labels) {
            if (!authority.contains(l)) continue;
            Partial extended = extend(*partial, credentials, Step{c, b, l});
            if (node_of(binding) == target && l == label) keep_min(best, extended);
            if (auto granted = authority_from(l); !granted.empty()) {
              keep_min(next[{node_of(binding), std::move(granted)}], std::move(extended));
            }
          }
        }
      }
    }
    if (best) {
      TrustChain chain;
      chain.subject = subject;
      chain.label = std::string(label);
      for (const Step& s : best->steps) {
        chain.links.push_back(ChainLink{credentials[s.credential], s.credential, s.binding, s.label});
      }
      return chain;
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

std::optional<TrustChain> evaluate_trust_propagation_after_rotation(
    const TrustPolicy& policy, std::span<const Sattestation> credentials,
    const Sata& /*old_sata*/, const Sata& new_sata, std::string_view label, Date now) {
  return evaluate(policy, credentials, new_sata, label, now);
}

RequiredTrust required_trust(const TrustPolicy& policy,
                             std::span<const Sattestation> credentials, const Sata& subject,
                             Date now) {
  RequiredTrust out;
  out.required = !policy.require_sattestation_for.empty();
  for (const auto& label : policy.require_sattestation_for) {
    if (auto chain = evaluate(policy, credentials, subject, label, now)) {
      out.chain = std::move(chain);
      break;
    }
  }
  return out;
}

bool has_fresh_binding(std::span<const Sattestation> credentials, const Sata& sattestor,
                       const Sata& subject, Date now) {
  for (const auto& c : credentials) {
    if (!c.body.sattestor().same_identity(sattestor)) continue;
    if (!verify_credential(c)) continue;
    for (std::size_t b = 0; b < c.body.sattestees.size(); ++b) {
      if (c.body.sattestees[b].identity().same_identity(subject) &&
          check_freshness(c, b, now).fresh) {
        return true;
      }
    }
  }
  return false;
}

RotationResult rotation_check(const Sata& old_sata, const Sata& new_sata,
                              std::span<const Sattestation> credentials, Date now) {
  if (old_sata.domain != new_sata.domain) {
    throw Error(Errc::DomainMismatch, "rotation keeps the domain: '" + old_sata.domain +
                                          "' vs '" + new_sata.domain + "'");
  }
  if (old_sata.onion == new_sata.onion) {
    return {false, "old and new SATA have the same onion address"};
  }
  const bool forward = has_fresh_binding(credentials, old_sata, new_sata, now);
  const bool backward = has_fresh_binding(credentials, new_sata, old_sata, now);
  if (forward && backward) return {true, "mutual sattestations present"};
  if (!backward) {
    return {false, forward ? "new SATA does not sattest the old SATA (framing defense)"
                           : "no valid sattestations in either direction"};
  }
  return {false, "old SATA does not sattest the new SATA"};
}

Sattestation expired_rotation_form(const Sata& old_sata, const Sata& new_sata,
                                   const KeyPair& key, Date issued, double refresh_rate_days) {
  if (key.public_key != old_sata.onion.public_key()) {
    throw Error(Errc::KeyMismatch, "key does not belong to the old SATA");
  }
  SattestationBody body;
  body.sattestor_domain = old_sata.domain;
  body.sattestor_onion = old_sata.onion;
  body.refresh_rate_days = refresh_rate_days;
  Binding b;
  b.domain = old_sata.domain;
  b.onion = old_sata.onion;
  b.labels = {rotation_pointer_label(new_sata)};
  b.issued = issued;
  b.refreshed_on = issued;
  body.sattestees.push_back(std::move(b));
  return issue(key, std::move(body));
}

TrustPolicy parse_trust_policy(std::string_view json) {
  ojson j;
  try {
    j = ojson::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  TrustPolicy p;
  try {
    for (const auto& r : j.at("roots")) {
      TrustRoot root{parse_sata(r.at("sattestor").get<std::string>()), {}};
      for (const auto& l : r.at("labels")) root.trusted_labels.insert(l.get<std::string>());
      p.roots.push_back(std::move(root));
    }
    p.max_chain_depth = j.value("max_chain_depth", kDefaultMaxChainDepth);
    if (j.contains("require_sattestation_for")) {
      for (const auto& l : j.at("require_sattestation_for")) {
        p.require_sattestation_for.insert(l.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("trust policy: ") + e.what());
  }
  p.validate();
  return p;
}

std::string to_json(const TrustPolicy& policy) {
  ojson roots = ojson::array();
  for (const auto& r : policy.roots) {
    roots.push_back({{"sattestor", to_query_form(r.sattestor)},
                     {"labels", std::vector<std::string>(r.trusted_labels.begin(),
                                                         r.trusted_labels.end())}});
  }
  ojson j;
  j["roots"] = std::move(roots);
  j["max_chain_depth"] = policy.max_chain_depth;
  j["require_sattestation_for"] = std::vector<std::string>(
      policy.require_sattestation_for.begin(), policy.require_sattestation_for.end());
  return j.dump();
}

}  // namespace satakit
