// URI parsing, normalization, and reference resolution (RFC 3986 subset
// sufficient for http-style hierarchical URIs).
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rell {

struct Uri {
  std::string scheme;     // lowercase after normalization
  std::string userinfo;   // without trailing '@', may be empty
  std::string host;       // lowercase after normalization
  std::string port;       // digits only, empty if absent
  std::string path;       // as given; "/" after normalization when empty
  std::optional<std::string> query;     // without '?'
  std::optional<std::string> fragment;  // without '#'

  std::string to_string() const;
};

// Parses an absolute URI (scheme required). Returns nullopt for relative
// references or text that does not split into URI components.
std::optional<Uri> parse_uri(std::string_view text);

// Removes "." and ".." segments per RFC 3986 section 5.2.4.
std::string remove_dot_segments(std::string_view path);

// Canonical form used for frontier identity: scheme and host lowercased,
// default port dropped (http:80, https:443), dot-segments resolved, empty
// path replaced by "/", fragment dropped. The query is preserved verbatim.
// Throws UriError for relative or unparseable input.
std::string normalize_uri(std::string_view uri);

// Resolves `reference` against absolute `base` (RFC 3986 section 5.2) and
// returns the target URI, fragment included when the reference carries one.
// Returns nullopt when the base is not absolute or the reference cannot be
// parsed.
std::optional<std::string> resolve_reference(std::string_view base,
                                             std::string_view reference);

}  // namespace rell
