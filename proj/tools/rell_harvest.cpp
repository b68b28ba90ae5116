// Command-line front end for the harvester.
//
//   rell-harvest validate DESC...
//   rell-harvest crawl --desc DESC --seed URI [--rules FILE] [--out FILE]
//                      [--max N] [--delay-ms N] [--infer] [--report FILE]
//   rell-harvest query STORE QUERY [--sameas] [--infer]
//
// Exit codes are a stable contract: 0 success, 1 domain error (invalid
// description, unresolvable seed, bad query), 2 environment error
// (unreadable or unwritable file).  The crawl's N-Quads export goes to
// --out or standard output; the key=value report goes to --report or
// standard error, so piping the export stays clean.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rell/bgp.hpp"
#include "rell/diag.hpp"
#include "rell/harvest.hpp"
#include "rell/mapping.hpp"
#include "rell/model.hpp"
#include "rell/nquads.hpp"
#include "rell/quadstore.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kEnvironmentError = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

int cmd_validate(const std::vector<std::string>& paths) {
  int worst = kOk;
  for (const std::string& path : paths) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << path << ": cannot read\n";
      worst = std::max(worst, kEnvironmentError);
      continue;
    }
    try {
      rell::RellDescription desc = rell::parse_description(*text);
      // The parse throws on every error-severity finding; what is left
      // can only be advisory.
      for (const rell::Diagnostic& diag : rell::validate_description(desc)) {
        std::cerr << path << ": " << rell::format_diagnostic(diag) << "\n";
      }
      std::cout << path << ": ok (service " << desc.service_id << ", "
                << desc.resources.size() << " resource types)\n";
    } catch (const rell::Error& e) {
      std::cerr << path << ": " << e.what() << "\n";
      worst = std::max(worst, kDomainError);
    }
  }
  return worst;
}

struct CrawlArgs {
  std::vector<std::string> descriptions;
  std::vector<std::string> seeds;
  std::string rules;
  std::string out;
  std::string report;
  std::size_t max_resources = 100;
  long delay_ms = 0;
  bool infer = false;
};

int cmd_crawl(const CrawlArgs& args) {
  rell::HarvestOptions options;
  for (const std::string& path : args.descriptions) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << path << ": cannot read\n";
      return kEnvironmentError;
    }
    try {
      options.descriptions.push_back(rell::parse_description(*text));
    } catch (const rell::Error& e) {
      std::cerr << path << ": " << e.what() << "\n";
      return kDomainError;
    }
  }
  if (!args.rules.empty()) {
    auto text = read_file(args.rules);
    if (!text) {
      std::cerr << args.rules << ": cannot read\n";
      return kEnvironmentError;
    }
    try {
      options.rules = rell::parse_extraction_rules(*text);
    } catch (const rell::Error& e) {
      std::cerr << args.rules << ": " << e.what() << "\n";
      return kDomainError;
    }
  }

  options.crawl.seeds = args.seeds;
  options.crawl.max_resources = args.max_resources;
  options.crawl.per_host_delay = std::chrono::milliseconds(args.delay_ms);
  options.infer = args.infer;

  rell::QuadStore store;
  rell::HarvestReport report;
  try {
    report = rell::harvest(store, options);
  } catch (const rell::Error& e) {
    // Configuration problems (an unresolvable seed, bad limits) surface
    // here, before anything was fetched.
    std::cerr << e.what() << "\n";
    return kDomainError;
  }

  const std::string exported = rell::serialize_nquads(store);
  if (args.out.empty() || args.out == "-") {
    std::cout << exported;
  } else if (!write_file(args.out, exported)) {
    std::cerr << args.out << ": cannot write\n";
    return kEnvironmentError;
  }

  const std::string formatted = rell::format_report(report);
  if (args.report.empty()) {
    std::cerr << formatted;
  } else if (!write_file(args.report, formatted)) {
    std::cerr << args.report << ": cannot write\n";
    return kEnvironmentError;
  }
  return kOk;
}

struct QueryArgs {
  std::string store_path;
  std::string query_path;
  bool sameas = false;
  bool infer = false;
};

int cmd_query(const QueryArgs& args) {
  auto store_text = read_file(args.store_path);
  if (!store_text) {
    std::cerr << args.store_path << ": cannot read\n";
    return kEnvironmentError;
  }
  rell::QuadStore store;
  try {
    rell::parse_nquads(*store_text, store);
  } catch (const rell::Error& e) {
    std::cerr << args.store_path << ": " << e.what() << "\n";
    return kDomainError;
  }

  auto query_text = read_file(args.query_path);
  if (!query_text) {
    std::cerr << args.query_path << ": cannot read\n";
    return kEnvironmentError;
  }
  rell::BgpQuery query;
  try {
    query = rell::parse_bgp_query(*query_text);
  } catch (const rell::QueryError& e) {
    std::cerr << args.query_path << ": " << e.what() << "\n";
    return kDomainError;
  }

  rell::QueryOptions query_options;
  query_options.sameas_expansion = args.sameas;
  query_options.infer_subproperties = args.infer;
  const rell::QueryResult result = rell::bgp_query(store, query,
                                                   query_options);

  for (std::size_t i = 0; i < result.variables.size(); ++i) {
    std::cout << (i ? "\t" : "") << "?" << result.variables[i];
  }
  std::cout << "\n";
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::cout << (i ? "\t" : "") << row[i].encode();
    }
    std::cout << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harvests RESTful services into an RDF dataset"};
  app.require_subcommand(1);

  std::vector<std::string> validate_paths;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check service descriptions and report problems");
  validate->add_option("paths", validate_paths, "Description files")
      ->required()
      ->expected(-1);

  CrawlArgs crawl_args;
  CLI::App* crawl = app.add_subcommand(
      "crawl", "Crawl described services and export N-Quads");
  crawl->add_option("--desc", crawl_args.descriptions,
                    "Service description file (repeatable)")
      ->required();
  crawl->add_option("--seed", crawl_args.seeds, "Seed URI (repeatable)")
      ->required();
  crawl->add_option("--rules", crawl_args.rules,
                    "Attribute extraction and identity rules file");
  crawl->add_option("--out", crawl_args.out,
                    "N-Quads output file (default: standard output)");
  crawl->add_option("--max", crawl_args.max_resources,
                    "Resource budget for the crawl");
  crawl->add_option("--delay-ms", crawl_args.delay_ms,
                    "Per-host politeness delay in milliseconds");
  crawl->add_flag("--infer", crawl_args.infer,
                  "Materialize the subproperty closure into the export");
  crawl->add_option("--report", crawl_args.report,
                    "Write the key=value report here (default: stderr)");

  QueryArgs query_args;
  CLI::App* query = app.add_subcommand(
      "query", "Run a basic graph pattern query over an N-Quads export");
  query->add_option("store", query_args.store_path, "N-Quads file")
      ->required();
  query->add_option("query", query_args.query_path, "Query file")->required();
  query->add_flag("--sameas", query_args.sameas,
                  "Match terms up to owl:sameAs equivalence");
  query->add_flag("--infer", query_args.infer,
                  "Evaluate under the subproperty closure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kDomainError;
  }

  if (validate->parsed()) return cmd_validate(validate_paths);
  if (crawl->parsed()) return cmd_crawl(crawl_args);
  return cmd_query(query_args);
}
