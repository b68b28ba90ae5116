#include "rell/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "rell/doc.hpp"

namespace rell {

namespace {

constexpr std::string_view kNamespace = "urn:rell:v1";

bool is_ws_only(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

bool valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(id[0])) && id[0] != '_') {
    return false;
  }
  return std::all_of(id.begin() + 1, id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

bool valid_media_type(std::string_view mt) {
  auto slash = mt.find('/');
  if (slash == std::string_view::npos || slash == 0 ||
      slash + 1 >= mt.size()) {
    return false;
  }
  if (mt.find('/', slash + 1) != std::string_view::npos) return false;
  return std::none_of(mt.begin(), mt.end(), [](unsigned char c) {
    return std::isspace(c);
  });
}

// RFC 9110 token characters.
bool valid_http_token(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    if (std::isalnum(c)) return true;
    switch (c) {
      case '!': case '#': case '$': case '%': case '&': case '\'':
      case '*': case '+': case '-': case '.': case '^': case '_':
      case '`': case '|': case '~':
        return true;
      default:
        return false;
    }
  });
}

// ------------------------------------------------------------- XML walking

[[noreturn]] void vocab_error(const std::string& msg) {
  throw VocabularyError(msg);
}

void check_vocabulary_element(const Node& elem,
                              const std::set<std::string_view>& allowed_attrs,
                              std::initializer_list<std::string_view> required) {
  if (elem.ns != kNamespace) {
    vocab_error("element '" + elem.name + "' is not in namespace " +
                std::string(kNamespace));
  }
  for (const Attr& attr : elem.attrs) {
    if (attr.name == "xmlns" || attr.name.rfind("xmlns:", 0) == 0) continue;
    if (!allowed_attrs.count(attr.name)) {
      vocab_error("unknown attribute '" + attr.name + "' on element '" +
                  elem.local + "'");
    }
  }
  for (std::string_view name : required) {
    if (!elem.find_attr(name)) {
      vocab_error("missing required attribute '" + std::string(name) +
                  "' on element '" + elem.local + "'");
    }
  }
}

// Element children; any non-whitespace text is a vocabulary violation.
std::vector<int> element_children(const DocTree& tree, int node) {
  std::vector<int> out;
  for (int child : tree.at(node).children) {
    const Node& n = tree.at(child);
    if (n.kind == Node::Kind::text) {
      if (!is_ws_only(n.text)) {
        vocab_error("unexpected text content inside '" +
                    tree.at(node).local + "'");
      }
      continue;
    }
    out.push_back(child);
  }
  return out;
}

std::optional<std::string> opt_attr(const Node& elem, std::string_view name) {
  const Attr* attr = elem.find_attr(name);
  if (!attr) return std::nullopt;
  return attr->value;
}

std::string req_attr(const Node& elem, std::string_view name) {
  return elem.find_attr(name)->value;  // presence checked beforehand
}

LinkSpec parse_link(const DocTree& tree, int node) {
  const Node& elem = tree.at(node);
  check_vocabulary_element(elem, {"id", "type", "target", "kind"}, {"id"});
  LinkSpec link;
  link.id = req_attr(elem, "id");
  link.link_type = opt_attr(elem, "type");
  link.target = opt_attr(elem, "target");
  if (auto kind = opt_attr(elem, "kind")) {
    if (*kind == "collection") {
      link.kind = LinkSpec::Kind::collection;
    } else if (*kind != "normal") {
      throw ValidationError("link '" + link.id + "': unknown kind '" + *kind +
                            "'");
    }
  }

  int selector_count = 0;
  for (int child : element_children(tree, node)) {
    const Node& c = tree.at(child);
    if (c.local == "selector") {
      check_vocabulary_element(c, {"xpath"}, {"xpath"});
      if (++selector_count > 1) {
        vocab_error("link '" + link.id + "' has more than one selector");
      }
      if (!element_children(tree, child).empty()) {
        vocab_error("'selector' does not allow child elements");
      }
      link.selector_source = req_attr(c, "xpath");
    } else if (c.local == "protocol") {
      check_vocabulary_element(c, {"scheme", "method", "payload"}, {});
      if (link.protocol) {
        vocab_error("link '" + link.id + "' has more than one protocol");
      }
      if (!element_children(tree, child).empty()) {
        vocab_error("'protocol' does not allow child elements");
      }
      ProtocolHint hint;
      if (auto scheme = opt_attr(c, "scheme")) hint.scheme = *scheme;
      if (auto method = opt_attr(c, "method")) hint.method = *method;
      hint.payload_template = opt_attr(c, "payload");
      link.protocol = hint;
    } else {
      vocab_error("unknown element '" + c.local + "' inside 'link'");
    }
  }
  if (selector_count == 0) {
    vocab_error("link '" + link.id + "' is missing its selector");
  }
  return link;
}

RepresentationSpec parse_representation(const DocTree& tree, int node) {
  const Node& elem = tree.at(node);
  check_vocabulary_element(elem, {"id", "mediatype", "schema"},
                           {"id", "mediatype"});
  RepresentationSpec repr;
  repr.id = req_attr(elem, "id");
  repr.media_type = req_attr(elem, "mediatype");
  repr.schema_ref = opt_attr(elem, "schema");
  for (int child : element_children(tree, node)) {
    const Node& c = tree.at(child);
    if (c.local != "link") {
      vocab_error("unknown element '" + c.local + "' inside 'representation'");
    }
    repr.links.push_back(parse_link(tree, child));
  }
  return repr;
}

ResourceType parse_resource(const DocTree& tree, int node) {
  const Node& elem = tree.at(node);
  check_vocabulary_element(elem, {"id", "name", "description"}, {"id"});
  ResourceType res;
  res.id = req_attr(elem, "id");
  res.name = opt_attr(elem, "name").value_or(res.id);
  res.description = opt_attr(elem, "description");
  for (int child : element_children(tree, node)) {
    const Node& c = tree.at(child);
    if (c.local == "uri") {
      check_vocabulary_element(c, {"match"}, {"match"});
      if (res.uri_pattern) {
        vocab_error("resource '" + res.id + "' has more than one uri element");
      }
      if (!element_children(tree, child).empty()) {
        vocab_error("'uri' does not allow child elements");
      }
      res.uri_pattern = req_attr(c, "match");
    } else if (c.local == "representation") {
      res.representations.push_back(parse_representation(tree, child));
    } else {
      vocab_error("unknown element '" + c.local + "' inside 'resource'");
    }
  }
  return res;
}

// --------------------------------------------------------------- validation

void add(std::vector<Diagnostic>& out, std::string code, std::string path,
         std::string message, Severity severity = Severity::error) {
  out.push_back({severity, std::move(code), std::move(path),
                 std::move(message)});
}

void check_identifier(std::vector<Diagnostic>& out, std::string_view id,
                      const std::string& path) {
  if (!valid_identifier(id)) {
    add(out, "bad-identifier", path,
        "identifier '" + std::string(id) + "' is not of the form "
        "[A-Za-z_][A-Za-z0-9_-]*");
  }
}

// ------------------------------------------------------------ serialization

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void emit_attr(std::string& out, std::string_view name, std::string_view value) {
  out += " ";
  out += name;
  out += "=\"";
  out += xml_escape(value);
  out += "\"";
}

void emit_opt_attr(std::string& out, std::string_view name,
                   const std::optional<std::string>& value) {
  if (value) emit_attr(out, name, *value);
}

}  // namespace

bool LinkSpec::operator==(const LinkSpec& other) const {
  // The parsed selector mirrors selector_source; comparing the source is
  // enough and keeps Selector free of comparison plumbing.
  return id == other.id && link_type == other.link_type &&
         target == other.target && kind == other.kind &&
         selector_source == other.selector_source &&
         protocol == other.protocol;
}

bool ResourceType::operator==(const ResourceType& other) const {
  return id == other.id && name == other.name &&
         description == other.description &&
         uri_pattern == other.uri_pattern &&
         representations == other.representations;
}

bool ResourceType::matches(std::string_view uri) const {
  if (!pattern) return false;
  return std::regex_match(uri.begin(), uri.end(), *pattern);
}

const ResourceType* RellDescription::find_resource(std::string_view id) const {
  for (const ResourceType& res : resources) {
    if (res.id == id) return &res;
  }
  return nullptr;
}

const LinkTypeDecl* RellDescription::find_link_type(std::string_view id) const {
  for (const LinkTypeDecl& lt : link_types) {
    if (lt.id == id) return &lt;
  }
  return nullptr;
}

std::optional<std::string> check_pattern_subset(std::string_view pattern) {
  if (pattern.empty()) return "empty pattern";
  bool in_class = false;
  bool prev_atom = false;
  std::size_t class_start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (in_class) {
      if (c == ']') {
        if (i == class_start + 1 ||
            (i == class_start + 2 && pattern[class_start + 1] == '^')) {
          return "empty character class";
        }
        in_class = false;
        prev_atom = true;
      } else if (c == '\\') {
        if (i + 1 >= pattern.size()) return "trailing backslash";
        ++i;
      } else if (c == '[' && i + 1 < pattern.size() && pattern[i + 1] == ':') {
        return "POSIX character classes are not in the portable subset";
      }
      continue;
    }
    switch (c) {
      case '[':
        in_class = true;
        class_start = i;
        break;
      case '\\': {
        if (i + 1 >= pattern.size()) return "trailing backslash";
        char esc = pattern[++i];
        if (esc >= '1' && esc <= '9') {
          return std::string("backreference '\\") + esc +
                 "' is not in the portable subset";
        }
        constexpr std::string_view allowed =
            "dDwWsSntr.*+?()[]{}\\/-^$|";
        if (allowed.find(esc) == std::string_view::npos) {
          return std::string("unsupported escape '\\") + esc + "'";
        }
        prev_atom = true;
        break;
      }
      case '(':
        if (i + 1 < pattern.size() && pattern[i + 1] == '?') {
          return "'(?' groups (lookaround, named, non-capturing) are not in "
                 "the portable subset";
        }
        ++depth;
        prev_atom = false;
        break;
      case ')':
        if (--depth < 0) return "unbalanced ')'";
        prev_atom = true;
        break;
      case '{':
      case '}':
        return "bounded quantifiers '{m,n}' are not in the portable subset "
               "(escape literal braces)";
      case '*':
      case '+':
      case '?':
        if (!prev_atom) {
          return std::string("quantifier '") + c + "' has nothing to repeat";
        }
        prev_atom = false;
        break;
      case '|':
        prev_atom = false;
        break;
      case '^':
      case '$':
        return std::string("'") + c +
               "' is not allowed; patterns are implicitly anchored";
      default:
        prev_atom = true;
    }
  }
  if (in_class) return "unterminated character class";
  if (depth > 0) return "unbalanced '('";
  return std::nullopt;
}

std::vector<Diagnostic> validate_description(const RellDescription& desc) {
  std::vector<Diagnostic> out;
  check_identifier(out, desc.service_id, "service");

  if (desc.resources.empty()) {
    add(out, "no-resources", "service",
        "a service provides one or more resources; none declared");
  }

  // Every id becomes part of a minted IRI in one shared namespace, so ids
  // are required to be unique across all four pools, not just within their
  // own kind.
  std::map<std::string, std::string> seen;  // id -> path of first occurrence
  auto claim = [&](const std::string& id, const std::string& path) {
    auto [it, inserted] = seen.emplace(id, path);
    if (!inserted) {
      add(out, "duplicate-id", path,
          "id '" + id + "' already used at " + it->second);
    }
  };

  for (const LinkTypeDecl& lt : desc.link_types) {
    std::string path = "linktype[" + lt.id + "]";
    check_identifier(out, lt.id, path);
    claim(lt.id, path);
  }

  for (const ResourceType& res : desc.resources) {
    std::string rpath = "resource[" + res.id + "]";
    check_identifier(out, res.id, rpath);
    claim(res.id, rpath);

    if (res.uri_pattern) {
      if (auto reason = check_pattern_subset(*res.uri_pattern)) {
        add(out, "bad-pattern", rpath,
            "uri pattern \"" + *res.uri_pattern + "\": " + *reason);
      } else {
        try {
          std::regex probe(*res.uri_pattern);
        } catch (const std::regex_error& e) {
          add(out, "bad-pattern", rpath,
              "uri pattern \"" + *res.uri_pattern + "\" fails to compile: " +
                  e.what());
        }
      }
    }

    for (const RepresentationSpec& repr : res.representations) {
      std::string ppath = rpath + "/representation[" + repr.id + "]";
      check_identifier(out, repr.id, ppath);
      claim(repr.id, ppath);

      if (!valid_media_type(repr.media_type)) {
        add(out, "bad-mediatype", ppath,
            "media type '" + repr.media_type +
                "' is not of the form type/subtype");
      }

      for (const LinkSpec& link : repr.links) {
        std::string lpath = ppath + "/link[" + link.id + "]";
        check_identifier(out, link.id, lpath);
        claim(link.id, lpath);

        if (link.kind == LinkSpec::Kind::collection && link.target) {
          add(out, "collection-with-target", lpath,
              "collection links are not allowed to specify a target "
              "(the target is the containing resource)");
        }
        if (link.target && !desc.find_resource(*link.target)) {
          add(out, "dangling-target", lpath,
              "target '" + *link.target +
                  "' names no resource declared in this description");
        }
        if (link.link_type && !desc.find_link_type(*link.link_type)) {
          add(out, "dangling-linktype", lpath,
              "link type '" + *link.link_type +
                  "' names no declared linktype");
        }
        try {
          parse_selector(link.selector_source);
        } catch (const SelectorError& e) {
          add(out, "bad-selector", lpath,
              "selector \"" + link.selector_source + "\": " + e.what());
        }
        if (link.protocol) {
          if (!valid_http_token(link.protocol->method)) {
            add(out, "bad-method", lpath,
                "method '" + link.protocol->method +
                    "' is not a valid HTTP token");
          }
          if (link.protocol->scheme != "http" &&
              link.protocol->scheme != "https") {
            add(out, "unimplemented-scheme", lpath,
                "scheme '" + link.protocol->scheme +
                    "' is declared but only http(s) is implemented",
                Severity::warning);
          }
        }
      }
    }
  }
  return out;
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string out =
      d.severity == Severity::error ? "error[" : "warning[";
  out += d.code + "] " + d.path + ": " + d.message;
  return out;
}

RellDescription parse_description(std::string_view xml_text) {
  DocTree tree = parse_xml(xml_text);
  int root = tree.root_element();
  const Node& service = tree.at(root);
  if (service.local != "service" || service.ns != kNamespace) {
    vocab_error("root element must be 'service' in namespace " +
                std::string(kNamespace) + ", found '" + service.name + "'");
  }
  check_vocabulary_element(service, {"id", "name", "description"}, {"id"});

  RellDescription desc;
  desc.service_id = req_attr(service, "id");
  desc.service_name = opt_attr(service, "name").value_or(desc.service_id);
  desc.description = opt_attr(service, "description");

  for (int child : element_children(tree, root)) {
    const Node& c = tree.at(child);
    if (c.local == "resource") {
      desc.resources.push_back(parse_resource(tree, child));
    } else if (c.local == "linktype") {
      check_vocabulary_element(c, {"id", "name", "description"}, {"id"});
      if (!element_children(tree, child).empty()) {
        vocab_error("'linktype' does not allow child elements");
      }
      LinkTypeDecl lt;
      lt.id = req_attr(c, "id");
      lt.name = opt_attr(c, "name").value_or(lt.id);
      lt.description = opt_attr(c, "description");
      desc.link_types.push_back(std::move(lt));
    } else {
      vocab_error("unknown element '" + c.local + "' inside 'service'");
    }
  }

  for (const Diagnostic& diag : validate_description(desc)) {
    if (diag.severity != Severity::error) continue;
    std::string msg = diag.path + ": " + diag.message;
    if (diag.code == "dangling-target" || diag.code == "dangling-linktype" ||
        diag.code == "collection-with-target") {
      throw ReferenceError(msg);
    }
    throw ValidationError(msg);
  }

  // Validation passed: compiling patterns and parsing selectors cannot fail.
  for (ResourceType& res : desc.resources) {
    if (res.uri_pattern) {
      res.pattern = std::make_shared<const std::regex>(*res.uri_pattern);
    }
    for (RepresentationSpec& repr : res.representations) {
      for (LinkSpec& link : repr.links) {
        link.selector = parse_selector(link.selector_source);
      }
    }
  }
  return desc;
}

std::string serialize_description(const RellDescription& desc) {
  std::string out = "<service";
  emit_attr(out, "xmlns", kNamespace);
  emit_attr(out, "id", desc.service_id);
  emit_attr(out, "name", desc.service_name);
  emit_opt_attr(out, "description", desc.description);
  out += ">\n";

  for (const LinkTypeDecl& lt : desc.link_types) {
    out += "  <linktype";
    emit_attr(out, "id", lt.id);
    emit_attr(out, "name", lt.name);
    emit_opt_attr(out, "description", lt.description);
    out += "/>\n";
  }

  for (const ResourceType& res : desc.resources) {
    out += "  <resource";
    emit_attr(out, "id", res.id);
    emit_attr(out, "name", res.name);
    emit_opt_attr(out, "description", res.description);
    out += ">\n";
    if (res.uri_pattern) {
      out += "    <uri";
      emit_attr(out, "match", *res.uri_pattern);
      out += "/>\n";
    }
    for (const RepresentationSpec& repr : res.representations) {
      out += "    <representation";
      emit_attr(out, "id", repr.id);
      emit_attr(out, "mediatype", repr.media_type);
      emit_opt_attr(out, "schema", repr.schema_ref);
      out += repr.links.empty() ? "/>\n" : ">\n";
      for (const LinkSpec& link : repr.links) {
        out += "      <link";
        emit_attr(out, "id", link.id);
        emit_opt_attr(out, "type", link.link_type);
        emit_opt_attr(out, "target", link.target);
        if (link.kind == LinkSpec::Kind::collection) {
          emit_attr(out, "kind", "collection");
        }
        out += ">\n        <selector";
        emit_attr(out, "xpath", link.selector_source);
        out += "/>\n";
        if (link.protocol) {
          out += "        <protocol";
          emit_attr(out, "scheme", link.protocol->scheme);
          emit_attr(out, "method", link.protocol->method);
          emit_opt_attr(out, "payload", link.protocol->payload_template);
          out += "/>\n";
        }
        out += "      </link>\n";
      }
      if (!repr.links.empty()) out += "    </representation>\n";
    }
    out += "  </resource>\n";
  }
  out += "</service>\n";
  return out;
}

std::optional<std::pair<std::string, std::string>> resolve_resource_type(
    const std::vector<RellDescription>& descs, std::string_view uri) {
  std::vector<std::pair<std::string, std::string>> matches;
  for (const RellDescription& desc : descs) {
    for (const ResourceType& res : desc.resources) {
      if (res.matches(uri)) matches.emplace_back(desc.service_id, res.id);
    }
  }
  if (matches.empty()) return std::nullopt;
  if (matches.size() > 1) {
    std::string msg = "uri \"" + std::string(uri) +
                      "\" matches multiple resource types:";
    for (const auto& [svc, res] : matches) {
      msg += " " + svc + "/" + res;
    }
    throw AmbiguityError(msg, std::move(matches));
  }
  return matches.front();
}

}  // namespace rell
