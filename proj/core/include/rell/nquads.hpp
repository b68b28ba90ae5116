// N-Quads and Turtle serialization.
//
// serialize_nquads is canonical: lines are sorted, and blank node labels
// are renamed deterministically (masked-sort first-occurrence order), so
// equal stores produce byte-equal output and serialize -> parse ->
// serialize is a fixed point.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rell/quadstore.hpp"

namespace rell {

std::string serialize_nquads(const QuadStore& store);

// Parses N-Quads text into the store; returns the number of quads newly
// inserted.  Graph labels must be IRIs (blank node graph labels are
// rejected).  Throws ValidationError naming the line on syntax errors.
std::size_t parse_nquads(std::string_view text, QuadStore& store);

// Turtle for the selected graph slice: prefixed, grouped by subject,
// rdf:type first as "a", deterministic order throughout.  `prefixes` maps
// prefix name -> namespace IRI; only used prefixes are declared.
std::string serialize_turtle(
    const QuadStore& store,
    const std::vector<std::pair<std::string, std::string>>& prefixes,
    QuadPattern::GraphSel graph_sel = QuadPattern::GraphSel::any,
    const std::optional<Term>& graph = std::nullopt);

// The prefix table used across exports: rdf, rdfs, owl, xsd, rell, mt.
std::vector<std::pair<std::string, std::string>> standard_prefixes();

}  // namespace rell
