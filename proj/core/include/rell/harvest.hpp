// The end-to-end pipeline: crawl per the service descriptions, map every
// fetched representation into the four-layer model, apply extraction and
// identity rules, and optionally run subproperty inference.  The store
// afterwards holds schema (default graph) plus one named graph per
// successfully fetched resource, ready for export or queries.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rell/crawler.hpp"
#include "rell/mapping.hpp"
#include "rell/model.hpp"
#include "rell/quadstore.hpp"

namespace rell {

struct HarvestOptions {
  std::vector<RellDescription> descriptions;
  CrawlConfig crawl;
  ExtractionRuleSet rules;  // may be empty: mapping without extraction
  bool infer = false;       // run the subproperty closure after mapping
};

struct HarvestReport {
  CrawlSummary crawl;
  std::size_t schema_quads = 0;      // layers 1 and 2
  std::size_t type_quads = 0;        // layer 3: rdf:type per resource
  std::size_t link_quads = 0;        // layer 3: link instances
  std::size_t attribute_quads = 0;   // extraction rules
  std::size_t sameas_quads = 0;      // identity maps
  std::size_t provenance_quads = 0;  // layer 4
  std::size_t inferred_triples = 0;  // closure additions (with infer)
  std::size_t skipped_records = 0;   // non-2xx fetches, no RDF emitted
  std::size_t total_quads = 0;       // store size after the run
  std::vector<std::string> warnings;
};

// What one record contributed.  Shared by the live pipeline and the
// offline corpus self-check so both count the same way.
struct RecordEmission {
  bool skipped = false;  // non-2xx: nothing asserted
  std::size_t type_quads = 0;
  std::size_t link_quads = 0;
  std::size_t attribute_quads = 0;
  std::size_t sameas_quads = 0;
  std::size_t provenance_quads = 0;
  std::vector<std::string> warnings;
};

// Maps one crawl record: individuals and link instances, attribute quads,
// identity-map sameAs quads (when the record's type has one registered),
// and the provenance typing, all in the record's content-addressed graph.
// Records with a non-2xx status assert nothing.
RecordEmission emit_record(QuadStore& store, const CrawlRecord& record,
                           const std::vector<RellDescription>& descriptions,
                           const ExtractionRuleSet& rules);

// Runs the whole pipeline into the store.  Throws what the crawler
// constructor and seed resolution throw (ConfigError, AmbiguityError);
// fetch failures afterwards are best-effort entries in the report.
HarvestReport harvest(QuadStore& store, const HarvestOptions& options);

// The report as stable, line-oriented key=value text (counts, per-type
// and per-status breakdowns, numbered warnings).
std::string format_report(const HarvestReport& report);

}  // namespace rell
