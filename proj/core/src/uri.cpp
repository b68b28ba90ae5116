#include "rell/uri.hpp"

#include <algorithm>
#include <cctype>

#include "rell/diag.hpp"

namespace rell {

namespace {

bool is_scheme_char(char c, bool first) {
  if (std::isalpha(static_cast<unsigned char>(c))) return true;
  if (first) return false;
  return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
         c == '.';
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

// Splits "authority" into userinfo/host/port. Keeps IPv6 brackets intact.
bool split_authority(std::string_view authority, Uri& out) {
  auto at = authority.rfind('@');
  if (at != std::string_view::npos) {
    out.userinfo = std::string(authority.substr(0, at));
    authority.remove_prefix(at + 1);
  }
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return false;
    out.host = std::string(authority.substr(0, close + 1));
    authority.remove_prefix(close + 1);
    if (authority.empty()) return true;
    if (authority.front() != ':') return false;
    authority.remove_prefix(1);
    out.port = std::string(authority);
  } else {
    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
      out.host = std::string(authority.substr(0, colon));
      out.port = std::string(authority.substr(colon + 1));
    } else {
      out.host = std::string(authority);
    }
  }
  return std::all_of(out.port.begin(), out.port.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
}

}  // namespace

std::string Uri::to_string() const {
  std::string out = scheme + "://";
  if (!userinfo.empty()) out += userinfo + "@";
  out += host;
  if (!port.empty()) out += ":" + port;
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

std::optional<Uri> parse_uri(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && is_scheme_char(text[i], i == 0)) ++i;
  if (i == 0 || i >= text.size() || text[i] != ':') return std::nullopt;
  Uri uri;
  uri.scheme = std::string(text.substr(0, i));
  std::string_view rest = text.substr(i + 1);
  if (rest.substr(0, 2) != "//") return std::nullopt;
  rest.remove_prefix(2);

  auto end_of_authority = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end_of_authority);
  if (authority.empty()) return std::nullopt;
  if (!split_authority(authority, uri)) return std::nullopt;
  if (uri.host.empty()) return std::nullopt;
  if (end_of_authority == std::string_view::npos) return uri;
  rest.remove_prefix(end_of_authority);

  auto hash = rest.find('#');
  if (hash != std::string_view::npos) {
    uri.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  auto question = rest.find('?');
  if (question != std::string_view::npos) {
    uri.query = std::string(rest.substr(question + 1));
    rest = rest.substr(0, question);
  }
  uri.path = std::string(rest);
  return uri;
}

std::string remove_dot_segments(std::string_view path) {
  std::string input(path);
  std::string output;
  while (!input.empty()) {
    if (input.rfind("../", 0) == 0) {
      input.erase(0, 3);
    } else if (input.rfind("./", 0) == 0) {
      input.erase(0, 2);
    } else if (input.rfind("/./", 0) == 0) {
      input.erase(0, 2);  // keep leading '/'
    } else if (input == "/.") {
      input = "/";
    } else if (input.rfind("/../", 0) == 0 || input == "/..") {
      if (input == "/..") {
        input = "/";
      } else {
        input.erase(0, 3);
      }
      auto last = output.rfind('/');
      output.erase(last == std::string::npos ? 0 : last);
    } else if (input == "." || input == "..") {
      input.clear();
    } else {
      std::size_t start = input.front() == '/' ? 1 : 0;
      auto next = input.find('/', start);
      output += input.substr(0, next == std::string::npos ? input.size() : next);
      input.erase(0, next == std::string::npos ? input.size() : next);
    }
  }
  return output;
}

std::string normalize_uri(std::string_view uri) {
  auto parsed = parse_uri(uri);
  if (!parsed) {
    throw UriError("not an absolute URI: \"" + std::string(uri) + "\"");
  }
  Uri u = *parsed;
  u.scheme = to_lower(u.scheme);
  u.host = to_lower(u.host);
  if ((u.scheme == "http" && u.port == "80") ||
      (u.scheme == "https" && u.port == "443")) {
    u.port.clear();
  }
  u.path = remove_dot_segments(u.path);
  if (u.path.empty()) u.path = "/";
  u.fragment.reset();
  return u.to_string();
}

std::optional<std::string> resolve_reference(std::string_view base,
                                             std::string_view reference) {
  // Absolute reference resolves to itself.
  if (auto abs = parse_uri(reference)) return abs->to_string();

  // A reference with a scheme that did not parse as scheme://authority is
  // opaque (mailto:, urn:); it cannot be resolved hierarchically.
  {
    std::size_t i = 0;
    while (i < reference.size() && is_scheme_char(reference[i], i == 0)) ++i;
    if (i > 0 && i < reference.size() && reference[i] == ':') {
      return std::nullopt;
    }
  }

  auto parsed_base = parse_uri(base);
  if (!parsed_base) return std::nullopt;
  Uri b = *parsed_base;
  b.fragment.reset();

  std::string_view ref = reference;
  std::optional<std::string> frag;
  auto hash = ref.find('#');
  if (hash != std::string_view::npos) {
    frag = std::string(ref.substr(hash + 1));
    ref = ref.substr(0, hash);
  }
  std::optional<std::string> query;
  auto question = ref.find('?');
  if (question != std::string_view::npos) {
    query = std::string(ref.substr(question + 1));
    ref = ref.substr(0, question);
  }

  // Scheme-relative ("//host/path") reuses only the base scheme.
  if (ref.substr(0, 2) == "//") {
    auto with_scheme = std::string(b.scheme) + ":" + std::string(ref);
    auto net = parse_uri(with_scheme);
    if (!net) return std::nullopt;
    net->query = query;
    net->fragment = frag;
    net->path = remove_dot_segments(net->path);
    return net->to_string();
  }

  Uri target = b;
  target.fragment = frag;
  if (ref.empty()) {
    if (query) target.query = query;
    // An empty reference keeps the base path and query.
  } else if (ref.front() == '/') {
    target.path = remove_dot_segments(ref);
    target.query = query;
  } else {
    std::string merged;
    if (b.path.empty()) {
      merged = "/" + std::string(ref);
    } else {
      auto last = b.path.rfind('/');
      merged = b.path.substr(0, last == std::string::npos ? 0 : last + 1) +
               std::string(ref);
    }
    target.path = remove_dot_segments(merged);
    target.query = query;
  }
  return target.to_string();
}

}  // namespace rell
