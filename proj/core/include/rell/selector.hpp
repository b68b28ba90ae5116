// Link selectors: the XPath subset used by service descriptions.
//
// Grammar (see docs/selector-grammar.md for the full EBNF):
//
//   selector  = ["/" | "//"] step {("/" | "//") step}
//   step      = nametest {predicate} | "@" name | "text()"
//   nametest  = name | "*"
//   predicate = "[" integer "]" | "[@" name "='" value "'" "]"
//
// "@name" and "text()" may only appear as the final step.  Positional
// predicates are simplified relative to XPath 1.0: they index into the
// full node set accumulated for the step across every context node, in
// document order, rather than per-context-node.  Valid XPath outside the
// subset (axes, functions, unions, comparisons) is rejected with
// SelectorError{unsupported=true} naming the construct.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rell/doc.hpp"

namespace rell {

struct Predicate {
  enum class Kind { position, attr_equals };
  Kind kind = Kind::position;
  int position = 0;  // 1-based
  std::string attr;
  std::string value;
};

struct Step {
  enum class Axis { child, descendant };
  enum class Test { element, any_element, attribute, text };
  Axis axis = Axis::child;
  Test test = Test::element;
  std::string name;  // element or attribute local name
  std::vector<Predicate> predicates;

  bool operator==(const Step&) const = default;
};

struct Selector {
  std::string text;       // as written
  bool absolute = false;  // leading "/" or "//": starts at the document node
  std::vector<Step> steps;
};

// Throws SelectorError with the byte offset of the problem; constructs
// outside the subset are flagged unsupported.
Selector parse_selector(std::string_view text);

// String results: attribute values for "@name", one entry per text node for
// "text()", and the concatenated text content for element-final selectors.
// Results are in document order.
std::vector<std::string> evaluate(const Selector& sel, const DocTree& tree);
std::vector<std::string> evaluate_from(const Selector& sel,
                                       const DocTree& tree, int context);

// Element results for element-final selectors; throws SelectorError when the
// selector ends in an attribute or text step.
std::vector<int> select_nodes(const Selector& sel, const DocTree& tree,
                              int context = 0);

}  // namespace rell
