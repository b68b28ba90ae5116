// Mapping harvested resources into the four-layer RDF model.
//
// Layer 1 is a fixed upper ontology (resources, representations,
// collections, links) plus a curated media-type class hierarchy.  Layer 2
// is derived from a service description: resource types and representations
// become classes, link types and link specs become properties.  Layer 3
// holds the harvested individuals and the links between them, and layer 4
// ties each fetched representation to its resource through a named graph
// whose ID is content-addressed.  Layers 1 and 2 live in the default
// graph; every layer-3 and layer-4 quad carries its provenance graph.
//
// Attribute extraction is declarative: an ExtractionRuleSet maps resource
// types to (selector, predicate) rules, loaded from a small XML vocabulary
// (urn:rell:transforms:v1):
//
//   <transforms xmlns="urn:rell:transforms:v1">
//     <for-type type="person">
//       <rule selector="//h1/text()" predicate="http://..#fn" kind="literal"/>
//       <rule selector="//a[@class='web']/@href" predicate="http://..#url"
//             kind="iri"/>
//     </for-type>
//     <identity-map type="usermap" group="//user" member="uri/text()"/>
//   </transforms>

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rell/crawler.hpp"
#include "rell/doc.hpp"
#include "rell/model.hpp"
#include "rell/quadstore.hpp"
#include "rell/selector.hpp"
#include "rell/term.hpp"

namespace rell {

// Layer 1: the upper ontology.  Classes rell:resource, rell:representation,
// and rell:collection (a subclass of rell:resource), the rell:link property
// relating resources to resources, and rell:represents relating
// representations to resources.  Returns the number of quads added;
// idempotent.
std::size_t emit_upper_ontology(QuadStore& store);

// Layer 1: the media-type class hierarchy.  A curated subset of the
// registry: mt:text over text.html and text.plain, mt:application over
// application.xml over application.atom-xml, mt:image over image.jpeg;
// the top-level classes are subclasses of rell:representation.  Returns
// the number of quads added; idempotent.
std::size_t emit_media_type_taxonomy(QuadStore& store);

// Layer 2: one service's domain ontology.  Resource types become classes
// under rell:resource (under rell:collection when any of their
// representations carries a collection link), representations become
// classes under their media-type class, link types become subproperties of
// rell:link, and each link spec becomes a subproperty of its link type
// (or of rell:link directly) with the source class as domain and the
// target class as range.  Returns the number of quads added.
std::size_t emit_domain_ontology(QuadStore& store, const RellDescription& desc);

struct ExtractionRule {
  enum class ObjectKind { literal, iri };

  std::string selector_source;
  Selector selector;
  std::string predicate;  // absolute IRI
  ObjectKind object_kind = ObjectKind::literal;
  std::string datatype;   // literal objects only; absolute IRI or empty
  std::string language;   // literal objects only; exclusive with datatype
};

// Groups of equivalent resource IRIs read from an identity document: the
// group selector picks one element per group, the member selector is
// evaluated relative to each group element and yields the member IRIs.
struct IdentityMapSpec {
  std::string group_source;
  Selector group;   // element-final
  std::string member_source;
  Selector member;
};

struct ExtractionRuleSet {
  // Keyed by resource type id.  Type ids are unique per service; a rule
  // set that spans services relies on the harvested corpus keeping them
  // globally distinct.
  std::map<std::string, std::vector<ExtractionRule>> entries;
  std::map<std::string, IdentityMapSpec> identity_maps;

  bool empty() const { return entries.empty() && identity_maps.empty(); }
};

// Strict parse of a transforms document.  Throws XmlError for ill-formed
// XML, VocabularyError for elements or attributes outside the vocabulary,
// SelectorError for a selector outside the supported subset, and
// ValidationError for anything else (relative predicate IRI, unknown kind,
// datatype together with lang, duplicate type entries).
ExtractionRuleSet parse_extraction_rules(std::string_view xml_text);

// Layer 4 graph ID: the service namespace, the letter "r", and the first
// 12 hex digits of SHA-256 over final_uri, one zero byte, and the body.
// Stable across crawls of identical content.
Term make_graph_id(const CrawlRecord& record);

// Layer 3: the resource's rdf:type quad plus one link-instance quad per
// in-scope occurrence (collection occurrences point back at the source
// resource; out-of-scope and invalid occurrences add nothing).  All quads
// go into the record's provenance graph.  Returns the number added.
std::size_t emit_individuals(QuadStore& store, const CrawlRecord& record);

struct ExtractionOutcome {
  std::size_t quads = 0;
  std::vector<std::string> warnings;
};

// Applies the rules registered for the record's resource type to its
// parsed body; each selector value becomes one attribute quad in the
// record's provenance graph.  IRI-valued rules resolve values against
// final_uri; a value that does not resolve is skipped with a warning.
// A type with no rules is a no-op.
ExtractionOutcome apply_extraction_rules(QuadStore& store,
                                         const ExtractionRuleSet& rules,
                                         const CrawlRecord& record,
                                         const DocTree& doc);

// Layer 4: types the provenance graph as the record's representation class
// and asserts that it represents the resource.  Both quads live in the
// graph they describe.  Returns the number added.
std::size_t emit_provenance(QuadStore& store, const CrawlRecord& record);

}  // namespace rell
