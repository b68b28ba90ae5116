#include "rell/quadstore.hpp"

#include <algorithm>

#include "rell/diag.hpp"
#include "rell/vocab.hpp"

namespace rell {

namespace {

void check_term(const Term& term) {
  if (term.is_literal()) {
    if (!term.datatype.empty() && !term.language.empty()) {
      throw ValidationError("literal \"" + term.value +
                            "\" carries both a datatype and a language tag");
    }
    return;
  }
  if (!term.datatype.empty() || !term.language.empty()) {
    throw ValidationError("non-literal term with literal fields");
  }
  if (term.is_iri() && !looks_absolute_iri(term.value)) {
    throw ValidationError("IRI is not absolute: \"" + term.value + "\"");
  }
  if (term.is_blank() && term.value.empty()) {
    throw ValidationError("blank node with an empty label");
  }
}

void check_quad(const Quad& quad) {
  check_term(quad.subject);
  check_term(quad.predicate);
  check_term(quad.object);
  if (quad.subject.is_literal()) {
    throw ValidationError("literal in subject position");
  }
  if (!quad.predicate.is_iri()) {
    throw ValidationError("predicate must be an IRI");
  }
  if (quad.graph) {
    check_term(*quad.graph);
    if (!quad.graph->is_iri()) {
      throw ValidationError("graph label must be an IRI");
    }
  }
}

bool matches(const Quad& quad, const QuadPattern& pattern) {
  if (pattern.subject && quad.subject != *pattern.subject) return false;
  if (pattern.predicate && quad.predicate != *pattern.predicate) return false;
  if (pattern.object && quad.object != *pattern.object) return false;
  switch (pattern.graph_sel) {
    case QuadPattern::GraphSel::any:
      return true;
    case QuadPattern::GraphSel::default_graph:
      return !quad.graph.has_value();
    case QuadPattern::GraphSel::named:
      return quad.graph && pattern.graph && *quad.graph == *pattern.graph;
  }
  return false;
}

}  // namespace

bool QuadStore::insert(Quad quad) {
  check_quad(quad);
  auto [it, inserted] = index_.insert(quad);
  if (!inserted) return false;
  std::size_t at = quads_.size();
  by_subject_[quad.subject.encode()].push_back(at);
  by_predicate_[quad.predicate.encode()].push_back(at);
  by_object_[quad.object.encode()].push_back(at);
  by_graph_[quad.graph ? quad.graph->encode() : std::string()].push_back(at);
  quads_.push_back(std::move(quad));
  return true;
}

bool QuadStore::contains(const Quad& quad) const {
  return index_.count(quad) > 0;
}

std::vector<Quad> QuadStore::match(const QuadPattern& pattern) const {
  // Narrow the scan through the most selective bound position.
  const std::vector<std::size_t>* candidates = nullptr;
  auto narrow = [&](const std::map<std::string, std::vector<std::size_t>>& ix,
                    const std::string& key) {
    auto it = ix.find(key);
    static const std::vector<std::size_t> kEmpty;
    const std::vector<std::size_t>* found = it == ix.end() ? &kEmpty
                                                           : &it->second;
    if (!candidates || found->size() < candidates->size()) candidates = found;
  };
  if (pattern.subject) narrow(by_subject_, pattern.subject->encode());
  if (pattern.predicate) narrow(by_predicate_, pattern.predicate->encode());
  if (pattern.object) narrow(by_object_, pattern.object->encode());
  if (pattern.graph_sel == QuadPattern::GraphSel::named && pattern.graph) {
    narrow(by_graph_, pattern.graph->encode());
  } else if (pattern.graph_sel == QuadPattern::GraphSel::default_graph) {
    narrow(by_graph_, std::string());
  }

  std::vector<Quad> out;
  if (candidates) {
    for (std::size_t i : *candidates) {
      if (matches(quads_[i], pattern)) out.push_back(quads_[i]);
    }
  } else {
    for (const Quad& quad : quads_) {
      if (matches(quad, pattern)) out.push_back(quad);
    }
  }
  // Canonical (encoded) order, precomputing the keys once per quad.
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    keys.emplace_back(out[i].encode(), i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Quad> ordered;
  ordered.reserve(out.size());
  for (const auto& [key, i] : keys) ordered.push_back(std::move(out[i]));
  return ordered;
}

std::vector<Quad> QuadStore::distinct_triples() const {
  std::set<Quad> seen;
  for (const Quad& quad : quads_) {
    Quad triple = quad;
    triple.graph.reset();
    seen.insert(std::move(triple));
  }
  return {seen.begin(), seen.end()};
}

std::vector<Term> QuadStore::graph_terms() const {
  std::set<Term> seen;
  for (const Quad& quad : quads_) {
    if (quad.graph) seen.insert(*quad.graph);
  }
  return {seen.begin(), seen.end()};
}

std::size_t subproperty_closure(QuadStore& store) {
  std::size_t added = 0;
  // New triples can themselves assert rdfs:subPropertyOf, so iterate until
  // a full pass adds nothing.
  for (;;) {
    // Direct subproperty edges, from any graph.
    std::map<Term, std::set<Term>> parents;
    QuadPattern sub_pattern;
    sub_pattern.predicate = vocab::rdfs_sub_property_of();
    for (const Quad& quad : store.match(sub_pattern)) {
      if (quad.subject.is_iri() && quad.object.is_iri()) {
        parents[quad.subject].insert(quad.object);
      }
    }
    // Transitive ancestors per property, cycle-safe.
    std::map<Term, std::set<Term>> ancestors;
    for (const auto& [prop, direct] : parents) {
      std::set<Term>& out = ancestors[prop];
      std::vector<Term> work(direct.begin(), direct.end());
      while (!work.empty()) {
        Term cur = work.back();
        work.pop_back();
        if (cur == prop || !out.insert(cur).second) continue;
        auto it = parents.find(cur);
        if (it != parents.end()) {
          work.insert(work.end(), it->second.begin(), it->second.end());
        }
      }
    }

    std::size_t added_this_pass = 0;
    // Snapshot: insertion invalidates nothing, but keeps the pass bounded.
    std::vector<Quad> snapshot = store.quads();
    for (const Quad& quad : snapshot) {
      auto it = ancestors.find(quad.predicate);
      if (it == ancestors.end()) continue;
      for (const Term& parent : it->second) {
        Quad inferred{quad.subject, parent, quad.object, std::nullopt};
        if (store.insert(std::move(inferred))) ++added_this_pass;
      }
    }
    added += added_this_pass;
    if (added_this_pass == 0) break;
  }
  return added;
}

SameAsIndex SameAsIndex::build(const QuadStore& store) {
  // Union-find over the terms that appear in owl:sameAs assertions.
  std::map<Term, Term> parent;
  auto find = [&](Term t) {
    while (true) {
      auto it = parent.find(t);
      if (it == parent.end() || it->second == t) return t;
      t = it->second;
    }
  };
  QuadPattern pattern;
  pattern.predicate = vocab::owl_same_as();
  for (const Quad& quad : store.match(pattern)) {
    if (quad.object.is_literal()) continue;
    Term a = find(quad.subject);
    Term b = find(quad.object);
    parent.try_emplace(quad.subject, quad.subject);
    parent.try_emplace(quad.object, quad.object);
    if (!(a == b)) parent[a] = b;
  }

  std::map<Term, std::vector<Term>> groups;
  for (const auto& [term, _] : parent) {
    groups[find(term)].push_back(term);
  }

  SameAsIndex index;
  for (auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    const Term& canonical = members.front();
    for (const Term& member : members) {
      index.rep_[member] = canonical;
    }
    index.classes_.push_back(members);
  }
  std::sort(index.classes_.begin(), index.classes_.end());
  return index;
}

Term SameAsIndex::representative(const Term& term) const {
  auto it = rep_.find(term);
  return it == rep_.end() ? term : it->second;
}

bool SameAsIndex::same(const Term& a, const Term& b) const {
  return representative(a) == representative(b);
}

}  // namespace rell
