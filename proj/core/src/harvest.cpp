#include "rell/harvest.hpp"

#include <optional>
#include <sstream>
#include <utility>

#include "rell/composition.hpp"
#include "rell/diag.hpp"
#include "rell/doc.hpp"

namespace rell {

namespace {

const RepresentationSpec* find_representation(
    const std::vector<RellDescription>& descriptions,
    const CrawlRecord& record) {
  for (const RellDescription& desc : descriptions) {
    if (desc.service_id != record.service_id) continue;
    const ResourceType* type = desc.find_resource(record.type_id);
    if (!type) return nullptr;
    for (const RepresentationSpec& rep : type->representations) {
      if (rep.id == record.representation_id) return &rep;
    }
    return nullptr;
  }
  return nullptr;
}

}  // namespace

RecordEmission emit_record(QuadStore& store, const CrawlRecord& record,
                           const std::vector<RellDescription>& descriptions,
                           const ExtractionRuleSet& rules) {
  RecordEmission out;
  if (record.status < 200 || record.status >= 300) {
    out.skipped = true;
    return out;
  }

  const std::size_t individuals = emit_individuals(store, record);
  out.type_quads = 1;
  out.link_quads = individuals - 1;

  // Extraction and identity rules need the parsed body; parse under the
  // declared representation's media type, like link extraction does.
  const bool wants_doc = rules.entries.count(record.type_id) ||
                         rules.identity_maps.count(record.type_id);
  if (wants_doc) {
    const RepresentationSpec* rep = find_representation(descriptions, record);
    std::optional<DocTree> doc;
    if (rep) {
      try {
        doc = parse_document(record.body, rep->media_type);
      } catch (const XmlError& e) {
        out.warnings.push_back(record.final_uri +
                               ": body parse failed, no attributes: " +
                               e.what());
      }
    }
    if (doc) {
      const ExtractionOutcome attrs =
          apply_extraction_rules(store, rules, record, *doc);
      out.attribute_quads = attrs.quads;
      out.warnings.insert(out.warnings.end(), attrs.warnings.begin(),
                          attrs.warnings.end());

      auto identity = rules.identity_maps.find(record.type_id);
      if (identity != rules.identity_maps.end()) {
        const IdentityOutcome ids = ingest_identity_map(
            store, *doc, identity->second, make_graph_id(record));
        out.sameas_quads = ids.quads;
        for (const std::string& w : ids.warnings) {
          out.warnings.push_back(record.final_uri + ": " + w);
        }
      }
    }
  }

  out.provenance_quads = emit_provenance(store, record);
  return out;
}

HarvestReport harvest(QuadStore& store, const HarvestOptions& options) {
  HarvestReport report;

  report.schema_quads += emit_upper_ontology(store);
  report.schema_quads += emit_media_type_taxonomy(store);
  for (const RellDescription& desc : options.descriptions) {
    report.schema_quads += emit_domain_ontology(store, desc);
  }

  Crawler crawler(options.descriptions, options.crawl);
  report.crawl = crawler.run([&](const CrawlRecord& record) {
    const RecordEmission emitted =
        emit_record(store, record, options.descriptions, options.rules);
    if (emitted.skipped) ++report.skipped_records;
    report.type_quads += emitted.type_quads;
    report.link_quads += emitted.link_quads;
    report.attribute_quads += emitted.attribute_quads;
    report.sameas_quads += emitted.sameas_quads;
    report.provenance_quads += emitted.provenance_quads;
    report.warnings.insert(report.warnings.end(), emitted.warnings.begin(),
                           emitted.warnings.end());
    if (record.status == 0 && !record.error.empty()) {
      report.warnings.push_back(record.request_uri +
                                ": fetch failed: " + record.error);
    }
  });

  if (options.infer) report.inferred_triples = subproperty_closure(store);
  report.total_quads = store.size();
  return report;
}

std::string format_report(const HarvestReport& report) {
  std::ostringstream out;
  out << "fetched=" << report.crawl.fetched << "\n";
  out << "skipped=" << report.skipped_records << "\n";
  out << "out_of_scope=" << report.crawl.out_of_scope << "\n";
  out << "invalid_links=" << report.crawl.invalid_links << "\n";
  out << "media_type_mismatches=" << report.crawl.media_type_mismatches
      << "\n";
  for (const auto& [status, count] : report.crawl.per_status) {
    out << "status." << status << "=" << count << "\n";
  }
  for (const auto& [type, count] : report.crawl.per_type) {
    out << "type." << type << "=" << count << "\n";
  }
  out << "quads.schema=" << report.schema_quads << "\n";
  out << "quads.types=" << report.type_quads << "\n";
  out << "quads.links=" << report.link_quads << "\n";
  out << "quads.attributes=" << report.attribute_quads << "\n";
  out << "quads.sameas=" << report.sameas_quads << "\n";
  out << "quads.provenance=" << report.provenance_quads << "\n";
  out << "quads.inferred=" << report.inferred_triples << "\n";
  out << "quads.total=" << report.total_quads << "\n";
  out << "warnings=" << report.warnings.size() << "\n";
  for (std::size_t i = 0; i < report.warnings.size(); ++i) {
    out << "warning." << (i + 1) << "=" << report.warnings[i] << "\n";
  }
  return out.str();
}

}  // namespace rell
