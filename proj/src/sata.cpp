#include "satakit/sata.hpp"

#include <algorithm>
#include <cctype>

#include "satakit/error.hpp"
#include "satakit/url.hpp"

namespace satakit {
namespace {

// The subdomain form adds a 62-char prefix ("<61 chars>.") to the domain.
constexpr std::size_t kMaxBaseDomainLength = 253 - kSubdomainLabelLength - 1;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

OnionAddress onion_component(std::string_view label, std::string_view where) {
  try {
    return parse_onion(label);
  } catch (const Error& e) {
    throw Error(Errc::InvalidOnionComponent,
                std::string(where) + " onion component rejected: " + e.what(),
                e.position());
  }
}

struct SubdomainHit {
  OnionAddress onion;
  std::string base_domain;
};

std::optional<SubdomainHit> subdomain_component(const std::string& host) {
  auto dot = host.find('.');
  std::string_view first =
      dot == std::string::npos ? std::string_view(host) : std::string_view(host).substr(0, dot);
  if (first.size() != kSubdomainLabelLength || !ends_with(first, kSubdomainMarker)) {
    return std::nullopt;
  }
  OnionAddress onion = onion_component(first.substr(0, kOnionLabelLength), "subdomain");
  if (dot == std::string::npos) {
    throw Error(Errc::InvalidOnionComponent,
                "subdomain onion component has no registered domain after it");
  }
  std::string base = host.substr(dot + 1);
  if (!is_valid_domain(base)) {
    throw Error(Errc::InvalidOnionComponent, "base domain '" + base + "' is not a DNS name");
  }
  return SubdomainHit{std::move(onion), normalize_domain(base)};
}

}  // namespace

std::string_view sata_form_name(SataForm form) noexcept {
  return form == SataForm::Subdomain ? "subdomain" : "query";
}

Sata make_sata(std::string_view domain, const OnionAddress& onion, SataForm form) {
  std::string d = normalize_domain(domain);
  if (d.size() > kMaxBaseDomainLength) {
    throw Error(Errc::InvalidDomain, "domain too long to carry a subdomain SATA");
  }
  return Sata{std::move(d), onion, form};
}

Sata parse_sata(std::string_view url_or_host) {
  std::string host;
  std::optional<Url> url;
  if (looks_like_url(url_or_host)) {
    url = parse_url(url_or_host);
    host = url->host;
  } else {
    host = lower(url_or_host);
    if (auto slash = host.find('/'); slash != std::string::npos) host.resize(slash);
    if (!host.empty() && host.back() == '.') host.pop_back();
  }

  std::optional<SubdomainHit> sub = subdomain_component(host);

  std::optional<OnionAddress> query_onion;
  if (url && url->has_query_param(kSataQueryParam)) {
    query_onion = onion_component(*url->query_param(kSataQueryParam), "query");
  }

  if (sub && query_onion) {
    if (!(sub->onion == *query_onion)) {
      throw Error(Errc::InvalidOnionComponent,
                  "subdomain and query onion components disagree");
    }
    return make_sata(sub->base_domain, sub->onion, SataForm::Subdomain);
  }
  if (sub) return make_sata(sub->base_domain, sub->onion, SataForm::Subdomain);
  if (query_onion) {
    if (!is_valid_domain(host)) {
      throw Error(Errc::InvalidOnionComponent, "host '" + host + "' is not a DNS name");
    }
    return make_sata(host, *query_onion, SataForm::QueryString);
  }
  throw Error(Errc::NotASata, "no onion component in '" + std::string(url_or_host) + "'");
}

std::string to_subdomain_form(const Sata& s) {
  return s.onion.label() + std::string(kSubdomainMarker) + "." + s.domain;
}

std::string to_query_form(const Sata& s) {
  return "https://" + s.domain + "/?" + std::string(kSataQueryParam) + "=" + s.onion.label();
}

std::string to_url(const Sata& s) {
  return s.form == SataForm::Subdomain ? "https://" + to_subdomain_form(s)
                                       : to_query_form(s);
}

std::vector<std::string> expected_sans(const Sata& s) {
  return {to_subdomain_form(s), s.domain, s.onion.host()};
}

bool is_securedrop_name(std::string_view hostname) noexcept {
  std::string h = lower(hostname);
  return h.size() > kSecureDropSuffix.size() && ends_with(h, kSecureDropSuffix);
}

SecureDropTarget securedrop_rewrite(std::string_view hostname,
                                    std::optional<std::string_view> onion_param) {
  std::string h = lower(hostname);
  if (!is_securedrop_name(h)) {
    throw Error(Errc::NotSecureDropName,
                "'" + h + "' does not end in " + std::string(kSecureDropSuffix));
  }
  h.resize(h.size() - kSecureDropSuffix.size());
  SecureDropTarget target;
  try {
    target.base_domain = normalize_domain(h);
  } catch (const Error&) {
    throw Error(Errc::NotSecureDropName, "'" + h + "' is not a DNS name");
  }
  if (onion_param) target.onion = onion_component(*onion_param, "securedrop");
  return target;
}

}  // namespace satakit
