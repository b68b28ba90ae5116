// RDF terms and quads.

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace rell {

struct Term {
  enum class Kind { iri, blank, literal };

  Kind kind = Kind::iri;
  std::string value;     // IRI text, blank label, or literal lexical form
  std::string datatype;  // literal only; empty means plain
  std::string language;  // literal only; mutually exclusive with datatype

  static Term iri(std::string value) {
    return {Kind::iri, std::move(value), "", ""};
  }
  static Term blank(std::string label) {
    return {Kind::blank, std::move(label), "", ""};
  }
  static Term literal(std::string lexical, std::string datatype = "",
                      std::string language = "") {
    return {Kind::literal, std::move(lexical), std::move(datatype),
            std::move(language)};
  }

  bool is_iri() const { return kind == Kind::iri; }
  bool is_blank() const { return kind == Kind::blank; }
  bool is_literal() const { return kind == Kind::literal; }

  // N-Quads form: <iri>, _:label, or "lexical"[@lang|^^<datatype>].
  std::string encode() const;

  auto operator<=>(const Term&) const = default;
};

struct Quad {
  Term subject;
  Term predicate;
  Term object;
  std::optional<Term> graph;  // absent = default graph

  std::string encode() const;  // the N-Quads line without relabeling

  auto operator<=>(const Quad&) const = default;
};

// Scheme-prefixed per RFC 3986; the minimum for an IRI to stand alone.
bool looks_absolute_iri(std::string_view iri);

}  // namespace rell
