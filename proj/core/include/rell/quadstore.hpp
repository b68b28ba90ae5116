// In-memory quad collection with set semantics, positional indexes,
// pattern matching, RDFS subproperty closure, and owl:sameAs partitioning.
//
// Concurrency: many concurrent readers or one writer; the closure
// operations mutate the store and take the writer role.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rell/term.hpp"

namespace rell {

struct QuadPattern {
  enum class GraphSel {
    any,            // all graphs, default included
    default_graph,  // quads with no graph term
    named,          // exactly the graph in `graph`
  };

  std::optional<Term> subject;
  std::optional<Term> predicate;
  std::optional<Term> object;
  GraphSel graph_sel = GraphSel::any;
  std::optional<Term> graph;  // used when graph_sel == named
};

class QuadStore {
 public:
  // True when the quad was newly added; duplicates are ignored.  Throws
  // ValidationError on a malformed quad (non-IRI predicate, literal
  // subject, literal with both datatype and language, relative IRI, named
  // graph that is not an IRI).
  bool insert(Quad quad);

  bool contains(const Quad& quad) const;
  std::size_t size() const { return quads_.size(); }

  // Insertion order; stable across runs given the same insertion sequence.
  const std::vector<Quad>& quads() const { return quads_; }

  // All quads matching the bound positions, in canonical (encoded) order.
  std::vector<Quad> match(const QuadPattern& pattern) const;

  // Distinct (subject, predicate, object) triples across all graphs, in
  // canonical order: the union-of-graphs view used by queries.
  std::vector<Quad> distinct_triples() const;

  // All named graph terms, canonically ordered.
  std::vector<Term> graph_terms() const;

 private:
  std::vector<Quad> quads_;
  std::set<Quad> index_;
  // Positional indexes keyed by encoded term.
  std::map<std::string, std::vector<std::size_t>> by_subject_;
  std::map<std::string, std::vector<std::size_t>> by_predicate_;
  std::map<std::string, std::vector<std::size_t>> by_object_;
  std::map<std::string, std::vector<std::size_t>> by_graph_;  // "" = default
};

// Adds, for every quad (s, p, o, g) and every strict subproperty ancestor
// p' of p, the triple (s, p', o) to the default graph (inferred triples
// carry no provenance context).  Runs to fixpoint, tolerates cycles, and
// returns the number of newly added triples.  Idempotent.
std::size_t subproperty_closure(QuadStore& store);

// Partition of terms under owl:sameAs, computed from assertions in any
// graph.  Nothing is materialized; queries expand at match time.
class SameAsIndex {
 public:
  static SameAsIndex build(const QuadStore& store);

  // The canonical member (least encoded form) of the term's class; the
  // term itself when it has no sameAs links.
  Term representative(const Term& term) const;
  bool same(const Term& a, const Term& b) const;

  // Classes with at least two members; members and classes canonically
  // ordered.  Terms absent here are singletons.
  const std::vector<std::vector<Term>>& classes() const { return classes_; }

 private:
  std::map<Term, Term> rep_;  // member -> canonical representative
  std::vector<std::vector<Term>> classes_;
};

}  // namespace rell
