// IRIs for the upper ontology, the media-type taxonomy, standard RDF
// vocabularies, and per-service namespaces.
//
// The source material names the upper-ontology terms (rell:resource,
// rell:link, ...) without stating base IRIs, so the bases here are minted:
// stable, readable, and carried through every export.

#pragma once

#include <string>
#include <string_view>

#include "rell/term.hpp"

namespace rell::vocab {

inline constexpr std::string_view kRdf =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs =
    "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kRell = "http://rell.example/ontology#";
inline constexpr std::string_view kMediaType =
    "http://rell.example/mediatype#";
inline constexpr std::string_view kServiceBase = "http://rell.example/service/";

inline Term rdf_type() { return Term::iri(std::string(kRdf) + "type"); }
inline Term rdf_property() { return Term::iri(std::string(kRdf) + "Property"); }
inline Term rdfs_class() { return Term::iri(std::string(kRdfs) + "Class"); }
inline Term rdfs_sub_class_of() {
  return Term::iri(std::string(kRdfs) + "subClassOf");
}
inline Term rdfs_sub_property_of() {
  return Term::iri(std::string(kRdfs) + "subPropertyOf");
}
inline Term rdfs_domain() { return Term::iri(std::string(kRdfs) + "domain"); }
inline Term rdfs_range() { return Term::iri(std::string(kRdfs) + "range"); }
inline Term rdfs_label() { return Term::iri(std::string(kRdfs) + "label"); }
inline Term owl_same_as() { return Term::iri(std::string(kOwl) + "sameAs"); }

// Upper ontology: resources, representations, collections, and the two
// relations "links relate resources to resources" and "representations
// represent resources".
inline Term rell_resource() {
  return Term::iri(std::string(kRell) + "resource");
}
inline Term rell_representation() {
  return Term::iri(std::string(kRell) + "representation");
}
inline Term rell_collection() {
  return Term::iri(std::string(kRell) + "collection");
}
inline Term rell_link() { return Term::iri(std::string(kRell) + "link"); }
inline Term rell_represents() {
  return Term::iri(std::string(kRell) + "represents");
}

// Per-service namespace, e.g. "http://rell.example/service/school#".
std::string service_ns(std::string_view service_id);
Term service_term(std::string_view service_id, std::string_view local);

// Media-type class local name: "/" becomes "." and "+" becomes "-", so
// application/atom+xml mints mt:application.atom-xml.
std::string media_type_local(std::string_view media_type);
Term media_type_class(std::string_view media_type);
// The top-level class for a media type: mt:text for text/html.
Term media_type_top_class(std::string_view media_type);

}  // namespace rell::vocab
