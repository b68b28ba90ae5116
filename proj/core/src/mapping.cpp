#include "rell/mapping.hpp"

#include <set>
#include <string>
#include <utility>

#include "rell/diag.hpp"
#include "rell/digest.hpp"
#include "rell/uri.hpp"
#include "rell/vocab.hpp"

namespace rell {

namespace {

constexpr std::string_view kTransformsNs = "urn:rell:transforms:v1";

Term mt(std::string_view local) {
  return Term::iri(std::string(vocab::kMediaType) + std::string(local));
}

std::size_t add(QuadStore& store, Term s, Term p, Term o) {
  return store.insert(
             Quad{std::move(s), std::move(p), std::move(o), std::nullopt})
             ? 1
             : 0;
}

std::size_t add_in(QuadStore& store, Term s, Term p, Term o, Term g) {
  return store.insert(
             Quad{std::move(s), std::move(p), std::move(o), std::move(g)})
             ? 1
             : 0;
}

std::size_t add_class(QuadStore& store, const Term& cls, const Term& super) {
  std::size_t n = 0;
  n += add(store, cls, vocab::rdf_type(), vocab::rdfs_class());
  n += add(store, cls, vocab::rdfs_sub_class_of(), super);
  return n;
}

bool has_collection_link(const ResourceType& type) {
  for (const RepresentationSpec& rep : type.representations) {
    for (const LinkSpec& link : rep.links) {
      if (link.kind == LinkSpec::Kind::collection) return true;
    }
  }
  return false;
}

}  // namespace

std::size_t emit_upper_ontology(QuadStore& store) {
  std::size_t n = 0;
  const Term cls = vocab::rdfs_class();
  const Term prop = vocab::rdf_property();
  const Term type = vocab::rdf_type();

  n += add(store, vocab::rell_resource(), type, cls);
  n += add(store, vocab::rell_representation(), type, cls);
  n += add(store, vocab::rell_collection(), type, cls);
  // Collections are resources in their own right: they have URIs and are
  // fetched like any other resource.
  n += add(store, vocab::rell_collection(), vocab::rdfs_sub_class_of(),
           vocab::rell_resource());

  n += add(store, vocab::rell_link(), type, prop);
  n += add(store, vocab::rell_link(), vocab::rdfs_domain(),
           vocab::rell_resource());
  n += add(store, vocab::rell_link(), vocab::rdfs_range(),
           vocab::rell_resource());

  n += add(store, vocab::rell_represents(), type, prop);
  n += add(store, vocab::rell_represents(), vocab::rdfs_domain(),
           vocab::rell_representation());
  n += add(store, vocab::rell_represents(), vocab::rdfs_range(),
           vocab::rell_resource());
  return n;
}

std::size_t emit_media_type_taxonomy(QuadStore& store) {
  std::size_t n = 0;
  const Term rep = vocab::rell_representation();
  n += add_class(store, mt("text"), rep);
  n += add_class(store, mt("application"), rep);
  n += add_class(store, mt("image"), rep);
  n += add_class(store, mt("text.html"), mt("text"));
  n += add_class(store, mt("text.plain"), mt("text"));
  n += add_class(store, mt("application.xml"), mt("application"));
  n += add_class(store, mt("application.atom-xml"), mt("application.xml"));
  n += add_class(store, mt("image.jpeg"), mt("image"));
  return n;
}

std::size_t emit_domain_ontology(QuadStore& store,
                                 const RellDescription& desc) {
  std::size_t n = 0;
  const std::string_view svc = desc.service_id;

  for (const LinkTypeDecl& lt : desc.link_types) {
    Term prop = vocab::service_term(svc, lt.id);
    n += add(store, prop, vocab::rdf_type(), vocab::rdf_property());
    n += add(store, std::move(prop), vocab::rdfs_sub_property_of(),
             vocab::rell_link());
  }

  for (const ResourceType& type : desc.resources) {
    const Term cls = vocab::service_term(svc, type.id);
    const Term super = has_collection_link(type) ? vocab::rell_collection()
                                                 : vocab::rell_resource();
    n += add_class(store, cls, super);

    for (const RepresentationSpec& rep : type.representations) {
      n += add_class(store, vocab::service_term(svc, rep.id),
                     vocab::media_type_class(rep.media_type));

      for (const LinkSpec& link : rep.links) {
        const Term link_prop = vocab::service_term(svc, link.id);
        Term super_prop = link.link_type
                              ? vocab::service_term(svc, *link.link_type)
                              : vocab::rell_link();
        n += add(store, link_prop, vocab::rdf_type(), vocab::rdf_property());
        n += add(store, link_prop, vocab::rdfs_sub_property_of(),
                 std::move(super_prop));
        n += add(store, link_prop, vocab::rdfs_domain(), cls);
        if (link.kind == LinkSpec::Kind::collection) {
          // Paging links stay within the collection, so the range is the
          // source class itself.
          n += add(store, link_prop, vocab::rdfs_range(), cls);
        } else if (link.target) {
          n += add(store, link_prop, vocab::rdfs_range(),
                   vocab::service_term(svc, *link.target));
        }
      }
    }
  }
  return n;
}

Term make_graph_id(const CrawlRecord& record) {
  std::string material = record.final_uri;
  material.push_back('\0');
  material += record.body;
  return Term::iri(vocab::service_ns(record.service_id) + "r" +
                   to_hex_prefix(sha256(material), 12));
}

std::size_t emit_individuals(QuadStore& store, const CrawlRecord& record) {
  const Term graph = make_graph_id(record);
  const Term subject = Term::iri(record.final_uri);
  std::size_t n = 0;
  n += add_in(store, subject, vocab::rdf_type(),
              vocab::service_term(record.service_id, record.type_id), graph);
  for (const LinkOccurrence& occ : record.links) {
    Term prop = vocab::service_term(record.service_id, occ.link_id);
    switch (occ.target.kind) {
      case LinkClass::in_scope:
        n += add_in(store, subject, std::move(prop),
                    Term::iri(occ.absolute_uri), graph);
        break;
      case LinkClass::collection_self:
        // More pages of the same collection: the link relates the
        // collection to itself, the pages are not separate individuals.
        n += add_in(store, subject, std::move(prop), subject, graph);
        break;
      case LinkClass::out_of_scope:
      case LinkClass::invalid:
        break;
    }
  }
  return n;
}

ExtractionOutcome apply_extraction_rules(QuadStore& store,
                                         const ExtractionRuleSet& rules,
                                         const CrawlRecord& record,
                                         const DocTree& doc) {
  ExtractionOutcome out;
  auto it = rules.entries.find(record.type_id);
  if (it == rules.entries.end()) return out;

  const Term graph = make_graph_id(record);
  const Term subject = Term::iri(record.final_uri);
  for (const ExtractionRule& rule : it->second) {
    const Term predicate = Term::iri(rule.predicate);
    for (const std::string& value : evaluate(rule.selector, doc)) {
      Term object;
      if (rule.object_kind == ExtractionRule::ObjectKind::iri) {
        std::optional<std::string> resolved;
        try {
          resolved = resolve_reference(record.final_uri, value);
        } catch (const UriError&) {
          resolved.reset();
        }
        if (!resolved) {
          out.warnings.push_back("rule " + rule.predicate + " on " +
                                 record.final_uri + ": value '" + value +
                                 "' does not resolve to an IRI, skipped");
          continue;
        }
        object = Term::iri(std::move(*resolved));
      } else {
        object = Term::literal(value, rule.datatype, rule.language);
      }
      out.quads += add_in(store, subject, predicate, std::move(object), graph);
    }
  }
  return out;
}

std::size_t emit_provenance(QuadStore& store, const CrawlRecord& record) {
  const Term graph = make_graph_id(record);
  std::size_t n = 0;
  n += add_in(store, graph, vocab::rdf_type(),
              vocab::service_term(record.service_id, record.representation_id),
              graph);
  n += add_in(store, graph, vocab::rell_represents(),
              Term::iri(record.final_uri), graph);
  return n;
}

// ----------------------------------------------------- transforms parsing

namespace {

[[noreturn]] void vocab_error(const std::string& msg) {
  throw VocabularyError(msg);
}

void check_element(const Node& elem,
                   const std::set<std::string_view>& allowed_attrs,
                   std::initializer_list<std::string_view> required) {
  if (elem.ns != kTransformsNs) {
    vocab_error("element '" + elem.name + "' is not in namespace " +
                std::string(kTransformsNs));
  }
  for (const Attr& attr : elem.attrs) {
    if (attr.name == "xmlns" || attr.name.rfind("xmlns:", 0) == 0) continue;
    if (!allowed_attrs.count(attr.name)) {
      vocab_error("unknown attribute '" + attr.name + "' on element '" +
                  elem.local + "'");
    }
  }
  for (std::string_view name : required) {
    if (!elem.find_attr(name)) {
      vocab_error("element '" + elem.local +
                  "' is missing required attribute '" + std::string(name) +
                  "'");
    }
  }
}

std::vector<int> element_children(const DocTree& tree, int node) {
  std::vector<int> out;
  for (int child : tree.at(node).children) {
    const Node& c = tree.at(child);
    if (c.kind == Node::Kind::text) {
      if (c.text.find_first_not_of(" \t\r\n") != std::string::npos) {
        vocab_error("unexpected text content inside '" + tree.at(node).local +
                    "'");
      }
      continue;
    }
    out.push_back(child);
  }
  return out;
}

ExtractionRule parse_rule(const Node& elem, const std::string& type_id) {
  check_element(elem, {"selector", "predicate", "kind", "datatype", "lang"},
                {"selector", "predicate", "kind"});
  ExtractionRule rule;
  rule.selector_source = elem.find_attr("selector")->value;
  rule.selector = parse_selector(rule.selector_source);
  rule.predicate = elem.find_attr("predicate")->value;
  if (!looks_absolute_iri(rule.predicate)) {
    throw ValidationError("rule for type '" + type_id + "': predicate '" +
                          rule.predicate + "' is not an absolute IRI");
  }
  const std::string kind = elem.find_attr("kind")->value;
  if (kind == "literal") {
    rule.object_kind = ExtractionRule::ObjectKind::literal;
  } else if (kind == "iri") {
    rule.object_kind = ExtractionRule::ObjectKind::iri;
  } else {
    throw ValidationError("rule for type '" + type_id + "': unknown kind '" +
                          kind + "'");
  }
  if (const Attr* dt = elem.find_attr("datatype")) {
    rule.datatype = dt->value;
    if (!looks_absolute_iri(rule.datatype)) {
      throw ValidationError("rule for type '" + type_id + "': datatype '" +
                            rule.datatype + "' is not an absolute IRI");
    }
  }
  if (const Attr* lang = elem.find_attr("lang")) rule.language = lang->value;
  if (!rule.datatype.empty() && !rule.language.empty()) {
    throw ValidationError("rule for type '" + type_id +
                          "': datatype and lang are mutually exclusive");
  }
  if (rule.object_kind == ExtractionRule::ObjectKind::iri &&
      (!rule.datatype.empty() || !rule.language.empty())) {
    throw ValidationError("rule for type '" + type_id +
                          "': datatype/lang only apply to literal objects");
  }
  return rule;
}

}  // namespace

ExtractionRuleSet parse_extraction_rules(std::string_view xml_text) {
  const DocTree tree = parse_xml(xml_text);
  const int root = tree.root_element();
  const Node& root_elem = tree.at(root);
  if (root_elem.local != "transforms") {
    vocab_error("expected root element 'transforms', found '" +
                root_elem.local + "'");
  }
  check_element(root_elem, {}, {});

  ExtractionRuleSet rules;
  for (int child : element_children(tree, root)) {
    const Node& elem = tree.at(child);
    if (elem.local == "for-type") {
      check_element(elem, {"type"}, {"type"});
      const std::string type_id = elem.find_attr("type")->value;
      if (rules.entries.count(type_id)) {
        throw ValidationError("duplicate for-type entry for '" + type_id +
                              "'");
      }
      std::vector<ExtractionRule> list;
      for (int rule_node : element_children(tree, child)) {
        const Node& rule_elem = tree.at(rule_node);
        if (rule_elem.local != "rule") {
          vocab_error("unknown element '" + rule_elem.local +
                      "' inside 'for-type'");
        }
        if (!element_children(tree, rule_node).empty()) {
          vocab_error("'rule' does not allow child elements");
        }
        list.push_back(parse_rule(rule_elem, type_id));
      }
      rules.entries.emplace(type_id, std::move(list));
    } else if (elem.local == "identity-map") {
      check_element(elem, {"type", "group", "member"},
                    {"type", "group", "member"});
      if (!element_children(tree, child).empty()) {
        vocab_error("'identity-map' does not allow child elements");
      }
      const std::string type_id = elem.find_attr("type")->value;
      if (rules.identity_maps.count(type_id)) {
        throw ValidationError("duplicate identity-map entry for '" + type_id +
                              "'");
      }
      IdentityMapSpec spec;
      spec.group_source = elem.find_attr("group")->value;
      spec.group = parse_selector(spec.group_source);
      spec.member_source = elem.find_attr("member")->value;
      spec.member = parse_selector(spec.member_source);
      rules.identity_maps.emplace(type_id, std::move(spec));
    } else {
      vocab_error("unknown element '" + elem.local + "' inside 'transforms'");
    }
  }
  return rules;
}

}  // namespace rell
