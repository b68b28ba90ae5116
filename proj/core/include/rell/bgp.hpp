// Basic-graph-pattern SELECT queries over a quad store.
//
// The accepted language is a small SPARQL subset:
//
//   PREFIX school: <http://rell.example/service/school#>
//   SELECT DISTINCT ?camera
//   WHERE { ?photo school:taken-with ?camera . ?photo a school:photo }
//
// Pattern slots are variables (?name), IRIs (<absolute> or prefixed names),
// quoted literals with an optional @lang or ^^datatype suffix, and the
// keyword `a` for rdf:type in predicate position.  `#` starts a comment.
// There is no OPTIONAL, FILTER, property path, or GRAPH clause: queries
// always run over the union of all graphs with duplicates collapsed.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rell/diag.hpp"
#include "rell/quadstore.hpp"
#include "rell/term.hpp"

namespace rell {

// One slot of a triple pattern: a variable or a concrete term.
struct PatternTerm {
  std::optional<std::string> variable;  // name without the '?'
  Term term;                            // meaningful when !variable

  bool is_variable() const { return variable.has_value(); }
};

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

struct BgpQuery {
  std::map<std::string, std::string> prefixes;  // name -> namespace IRI
  std::vector<std::string> projected;           // SELECT order
  bool distinct = false;
  std::vector<TriplePattern> patterns;
};

// Parses the query text.  Throws QueryError (with the byte offset) on
// syntax errors, undeclared prefixes, duplicate SELECT variables, and
// projected variables that never appear in the WHERE clause.
BgpQuery parse_bgp_query(std::string_view text);

struct QueryOptions {
  // Evaluate over a copy of the store augmented with the subproperty
  // closure, so triples implied by rdfs:subPropertyOf chains match.
  bool infer_subproperties = false;
  // Match terms up to owl:sameAs equivalence; result bindings use the
  // canonical (least encoded) member of each equivalence class.
  bool sameas_expansion = false;
  // Force row deduplication even when the query text lacks DISTINCT.
  bool distinct = false;
};

struct QueryResult {
  std::vector<std::string> variables;   // same order as the SELECT clause
  std::vector<std::vector<Term>> rows;  // each row aligned with `variables`
};

// Standard join semantics over the triple patterns, evaluated on the
// distinct-triples view of the store.  Rows come back sorted; with
// DISTINCT (in the query or the options) they are also deduplicated.
QueryResult bgp_query(const QuadStore& store, const BgpQuery& query,
                      const QueryOptions& options = {});

}  // namespace rell
