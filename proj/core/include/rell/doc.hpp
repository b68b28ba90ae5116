// Document trees for harvested representations.
//
// Two parsers produce the same tree shape: a strict XML parser that rejects
// ill-formed input with line/column positions, and a tolerant HTML parser
// that repairs common authoring shortcuts (unclosed p/li/td, implied
// html/head/body, unquoted attributes) by fixed rules so the same bytes
// always yield the same tree.  docs/html-repair.md lists the rules.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rell {

struct Attr {
  std::string name;   // as written (lowercased in HTML)
  std::string local;  // name with any prefix removed
  std::string value;
};

struct Node {
  enum class Kind { document, element, text };

  Kind kind = Kind::element;
  std::string name;   // qualified name as written (lowercased in HTML)
  std::string local;  // name with any prefix removed
  std::string ns;     // resolved namespace URI; empty outside XML mode
  std::string text;   // content of text nodes
  std::vector<Attr> attrs;
  int parent = -1;
  std::vector<int> children;
  std::size_t line = 0;    // 1-based position of the opening construct
  std::size_t column = 0;  // 1-based, counted in bytes

  const Attr* find_attr(std::string_view local_name) const;
};

// Flat node arena; nodes[0] is a synthetic document node whose children are
// the top-level elements (exactly one for XML).
struct DocTree {
  std::vector<Node> nodes;

  const Node& at(int index) const {
    return nodes[static_cast<std::size_t>(index)];
  }
  // Index of the first element child of the document node, or -1.
  int root_element() const;
  // Concatenated text of all descendant text nodes, document order.
  std::string text_content(int index) const;
};

// Strict parser; throws XmlError on ill-formed input.  Tracks namespace
// declarations in scope and stores the resolved URI on each element.
DocTree parse_xml(std::string_view text);

// Tolerant parser; never throws.  Names are lowercased, namespaces are not
// resolved, and structural damage is repaired per the documented rules.
DocTree parse_html(std::string_view text);

// The lowercased media type with any parameters (";charset=...") removed.
std::string media_type_base(std::string_view content_type);

// True for application/xml, text/xml, and any type with a +xml suffix.
bool is_xml_media_type(std::string_view media_type);

// Dispatches on the media type: XML types parse strictly (XmlError
// propagates), text/html parses tolerantly, anything else is opaque and
// yields nullopt.
std::optional<DocTree> parse_document(std::string_view body,
                                      std::string_view media_type);

}  // namespace rell
