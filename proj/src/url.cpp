#include "satakit/url.hpp"

#include <algorithm>
#include <cctype>

#include "satakit/error.hpp"

namespace satakit {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex_value(s[i + 1]);
      int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>((hi << 4) | lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i] == '+' ? ' ' : s[i]);
  }
  return out;
}

}  // namespace

std::optional<std::string> Url::query_param(std::string_view name) const {
  for (const auto& [k, v] : query) {
    if (k == name) return v;
  }
  return std::nullopt;
}

bool Url::has_query_param(std::string_view name) const {
  return query_param(name).has_value();
}

std::string Url::to_string() const {
  std::string out = scheme + "://" + host;
  if (port) out += ":" + *port;
  out += path;
  if (!query.empty()) {
    out += "?";
    for (std::size_t i = 0; i < query.size(); ++i) {
      if (i) out += "&";
      out += query[i].first + "=" + query[i].second;
    }
  }
  return out;
}

bool looks_like_url(std::string_view text) noexcept {
  return text.find("://") != std::string_view::npos;
}

Url parse_url(std::string_view text) {
  Url url;
  auto sep = text.find("://");
  if (sep == std::string_view::npos || sep == 0) {
    throw Error(Errc::ParseError, "missing scheme in URL '" + std::string(text) + "'");
  }
  url.scheme = lower(text.substr(0, sep));
  std::string_view rest = text.substr(sep + 3);

  if (auto hash = rest.find('#'); hash != std::string_view::npos) {
    rest = rest.substr(0, hash);
  }
  std::string_view query;
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    query = rest.substr(q + 1);
    rest = rest.substr(0, q);
  }
  std::string_view authority = rest;
  if (auto slash = rest.find('/'); slash != std::string_view::npos) {
    authority = rest.substr(0, slash);
    url.path = std::string(rest.substr(slash));
  }
  if (authority.find('@') != std::string_view::npos) {
    throw Error(Errc::ParseError, "userinfo is not supported in URLs");
  }
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    url.port = std::string(authority.substr(colon + 1));
    authority = authority.substr(0, colon);
    if (url.port->empty() ||
        !std::all_of(url.port->begin(), url.port->end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      throw Error(Errc::ParseError, "bad port in URL");
    }
  }
  if (authority.empty()) {
    throw Error(Errc::ParseError, "URL has an empty host");
  }
  url.host = lower(authority);

  while (!query.empty()) {
    auto amp = query.find('&');
    std::string_view pair = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    if (pair.empty()) continue;
    auto eq = pair.find('=');
    std::string key = percent_decode(pair.substr(0, eq));
    std::string value =
        eq == std::string_view::npos ? std::string{} : percent_decode(pair.substr(eq + 1));
    url.query.emplace_back(std::move(key), std::move(value));
  }
  return url;
}

std::string normalize_domain(std::string_view name) {
  std::string d = lower(name);
  if (!d.empty() && d.back() == '.') d.pop_back();
  if (d.empty() || d.size() > 253) {
    throw Error(Errc::InvalidDomain, "domain length out of range: '" + d + "'");
  }
  std::size_t start = 0;
  while (start <= d.size()) {
    auto dot = d.find('.', start);
    std::size_t end = dot == std::string::npos ? d.size() : dot;
    std::string_view label(d.data() + start, end - start);
    if (label.empty() || label.size() > 63) {
      throw Error(Errc::InvalidDomain, "bad label length in '" + d + "'", start);
    }
    if (label.front() == '-' || label.back() == '-') {
      throw Error(Errc::InvalidDomain, "label starts or ends with '-' in '" + d + "'", start);
    }
    for (std::size_t i = 0; i < label.size(); ++i) {
      char c = label[i];
      bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
      if (!ok) {
        throw Error(Errc::InvalidDomain, "illegal character in '" + d + "'", start + i);
      }
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return d;
}

bool is_valid_domain(std::string_view name) noexcept {
  try {
    normalize_domain(name);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace satakit
