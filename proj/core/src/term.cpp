#include "rell/term.hpp"

#include <cctype>

namespace rell {

namespace {

// Literal string escaping per the N-Quads grammar.
std::string escape_literal(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string Term::encode() const {
  switch (kind) {
    case Kind::iri:
      return "<" + value + ">";
    case Kind::blank:
      return "_:" + value;
    case Kind::literal: {
      std::string out = "\"" + escape_literal(value) + "\"";
      if (!language.empty()) {
        out += "@" + language;
      } else if (!datatype.empty()) {
        out += "^^<" + datatype + ">";
      }
      return out;
    }
  }
  return {};
}

std::string Quad::encode() const {
  std::string out = subject.encode() + " " + predicate.encode() + " " +
                    object.encode();
  if (graph) out += " " + graph->encode();
  return out + " .";
}

bool looks_absolute_iri(std::string_view iri) {
  if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri[0]))) {
    return false;
  }
  for (std::size_t i = 1; i < iri.size(); ++i) {
    char c = iri[i];
    if (c == ':') return true;  // scheme delimiter reached
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' &&
        c != '-' && c != '.') {
      return false;
    }
  }
  return false;
}

}  // namespace rell
