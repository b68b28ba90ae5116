// Domain model for service descriptions: resource types with URI patterns,
// representations, links with selectors, and declared link types, plus the
// strict parser/validator for the XML form.
//
// The XML vocabulary lives in namespace urn:rell:v1:
//
//   <service id= name= description=>
//     <linktype id= name= description=/>
//     <resource id= name= description=>
//       <uri match=/>
//       <representation id= mediatype= schema=>
//         <link id= type= target= kind=>
//           <selector xpath=/>
//           <protocol scheme= method= payload=/>
//         </link>
//       </representation>
//     </resource>
//   </service>
//
// URI patterns are anchored full-match regular expressions restricted to a
// portable subset: literals, character classes, ".", "*", "+", "?",
// alternation, and plain grouping.  Bounded quantifiers, backreferences,
// and lookaround are rejected.

#pragma once

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rell/diag.hpp"
#include "rell/selector.hpp"

namespace rell {

struct ProtocolHint {
  std::string scheme = "http";
  std::string method = "GET";
  std::optional<std::string> payload_template;

  bool operator==(const ProtocolHint&) const = default;
};

struct LinkSpec {
  enum class Kind { normal, collection };

  std::string id;
  std::optional<std::string> link_type;  // declared LinkTypeDecl id
  std::optional<std::string> target;     // resource type id; absent with
                                         // kind=normal means out-of-scope
  Kind kind = Kind::normal;
  std::string selector_source;
  Selector selector;  // parsed form of selector_source
  std::optional<ProtocolHint> protocol;

  bool operator==(const LinkSpec& other) const;
};

struct RepresentationSpec {
  std::string id;
  std::string media_type;
  std::optional<std::string> schema_ref;  // preserved, never enforced
  std::vector<LinkSpec> links;

  bool operator==(const RepresentationSpec&) const = default;
};

struct ResourceType {
  std::string id;
  std::string name;
  std::optional<std::string> description;
  std::optional<std::string> uri_pattern;  // source text
  // Compiled anchored pattern; null when uri_pattern is absent.  Shared so
  // descriptions stay cheap to copy.
  std::shared_ptr<const std::regex> pattern;
  std::vector<RepresentationSpec> representations;

  bool operator==(const ResourceType& other) const;
  bool matches(std::string_view uri) const;
};

struct LinkTypeDecl {
  std::string id;
  std::string name;
  std::optional<std::string> description;

  bool operator==(const LinkTypeDecl&) const = default;
};

struct RellDescription {
  std::string service_id;
  std::string service_name;
  std::optional<std::string> description;
  std::vector<ResourceType> resources;
  std::vector<LinkTypeDecl> link_types;

  bool operator==(const RellDescription&) const = default;

  const ResourceType* find_resource(std::string_view id) const;
  const LinkTypeDecl* find_link_type(std::string_view id) const;
};

// Strict parse of one description document.  Throws XmlError (ill-formed
// XML), VocabularyError (element/attribute outside the vocabulary, wrong
// namespace, missing required attribute), ReferenceError (dangling target
// or link-type reference, collection link with a target), or
// ValidationError (any other invariant violation).
RellDescription parse_description(std::string_view xml_text);

// All invariant violations as diagnostics; empty for a valid description.
// parse_description throws on the first error-severity entry of this list.
std::vector<Diagnostic> validate_description(const RellDescription& desc);

// The XML form of a description; parse_description(serialize_description(d))
// is structurally equal to d.
std::string serialize_description(const RellDescription& desc);

// Rejects regular expressions outside the portable subset with a
// human-readable reason; accepted patterns also compile as std::regex.
std::optional<std::string> check_pattern_subset(std::string_view pattern);

// The unique resource type whose pattern matches the (normalized, absolute)
// URI, as (service_id, resource_type_id).  Throws AmbiguityError when two
// or more types match across the loaded descriptions.
std::optional<std::pair<std::string, std::string>> resolve_resource_type(
    const std::vector<RellDescription>& descs, std::string_view uri);

}  // namespace rell
