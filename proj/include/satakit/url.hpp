#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace satakit {

/// Minimal absolute-URL view: scheme://host[:port][/path][?query][#frag].
/// Userinfo is rejected; the host is lowercased.
struct Url {
  std::string scheme;
  std::string host;
  std::optional<std::string> port;
  std::string path = "/";
  std::vector<std::pair<std::string, std::string>> query;

  /// First value for `name`, percent-decoded.
  std::optional<std::string> query_param(std::string_view name) const;
  bool has_query_param(std::string_view name) const;
  std::string to_string() const;
};

/// Throws Error{ParseError}.
Url parse_url(std::string_view text);

bool looks_like_url(std::string_view text) noexcept;

/// Lowercases, strips one trailing dot, and enforces DNS syntax: labels of
/// [a-z0-9-] (1-63 chars, no leading/trailing hyphen), total <= 253.
/// Throws Error{InvalidDomain}.
std::string normalize_domain(std::string_view name);
bool is_valid_domain(std::string_view name) noexcept;

}  // namespace satakit
