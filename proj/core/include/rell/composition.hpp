// Composing harvested services through identity documents.
//
// A glue service publishes documents listing the IRIs one real-world
// entity has across services.  Ingesting such a document emits a chain of
// owl:sameAs quads per group (u1-u2, u2-u3, ...); the union-find closure
// in the query engine recovers the full clique, so queries with sameAs
// expansion treat the group as one resource.  Composition only ever adds
// sameAs quads and their provenance, never other harvested data.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rell/bgp.hpp"
#include "rell/doc.hpp"
#include "rell/mapping.hpp"
#include "rell/quadstore.hpp"
#include "rell/term.hpp"

namespace rell {

struct IdentityOutcome {
  std::size_t quads = 0;  // newly added sameAs quads
  std::size_t groups = 0;  // groups that yielded quads
  std::vector<std::string> warnings;
};

// Reads identity groups from a parsed document and emits the sameAs chains
// into the given provenance graph.  Group members must resolve to absolute
// IRIs; unusable members are dropped with a warning, and a group left with
// fewer than two members is skipped with a warning.  Duplicate groups add
// nothing (set semantics).
IdentityOutcome ingest_identity_map(QuadStore& store, const DocTree& doc,
                                    const IdentityMapSpec& spec,
                                    const Term& graph);

// A cross-service query: bgp_query with sameAs expansion always on, so
// results treat equivalent resources as one.
QueryResult compose_and_query(const QuadStore& store, const BgpQuery& query,
                              QueryOptions options = {});

}  // namespace rell
