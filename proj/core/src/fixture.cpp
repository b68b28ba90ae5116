#include "rell/fixture.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rell/bgp.hpp"
#include "rell/composition.hpp"
#include "rell/crawler.hpp"
#include "rell/diag.hpp"
#include "rell/digest.hpp"
#include "rell/doc.hpp"
#include "rell/harvest.hpp"
#include "rell/mapping.hpp"
#include "rell/quadstore.hpp"
#include "rell/selector.hpp"
#include "rell/uri.hpp"
#include "rell/vocab.hpp"

namespace rell {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string require_string(const json& node, const char* key,
                           const std::string& where) {
  if (!node.contains(key) || !node[key].is_string()) {
    throw ValidationError("manifest.json: " + where + " needs a string \"" +
                          key + "\"");
  }
  return node[key].get<std::string>();
}

void require_file(const fs::path& corpus_dir, const std::string& rel,
                  const std::string& role) {
  if (!fs::is_regular_file(corpus_dir / rel)) {
    throw ValidationError("manifest.json: " + role + " file \"" + rel +
                          "\" does not exist");
  }
}

}  // namespace

CorpusManifest load_manifest(const std::string& corpus_dir) {
  fs::path root(corpus_dir);
  fs::path manifest_path = root / "manifest.json";
  if (!fs::is_regular_file(manifest_path)) {
    throw ValidationError("no manifest.json in " + corpus_dir);
  }

  json doc;
  try {
    doc = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest.json: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError("manifest.json: top level must be an object");
  }

  CorpusManifest manifest;
  manifest.corpus_dir = corpus_dir;

  if (!doc.contains("descriptions") || !doc["descriptions"].is_object() ||
      doc["descriptions"].empty()) {
    throw ValidationError(
        "manifest.json: \"descriptions\" must map at least one service to "
        "its description file");
  }
  for (const auto& [service, file] : doc["descriptions"].items()) {
    if (!file.is_string()) {
      throw ValidationError("manifest.json: description for \"" + service +
                            "\" must be a file path");
    }
    require_file(root, file.get<std::string>(), "description");
    manifest.descriptions[service] = file.get<std::string>();
  }

  if (doc.contains("transforms")) {
    if (!doc["transforms"].is_string()) {
      throw ValidationError("manifest.json: \"transforms\" must be a path");
    }
    manifest.transforms_file = doc["transforms"].get<std::string>();
    require_file(root, manifest.transforms_file, "transforms");
  }

  if (doc.contains("queries")) {
    if (!doc["queries"].is_object()) {
      throw ValidationError("manifest.json: \"queries\" must be an object");
    }
    for (const auto& [name, file] : doc["queries"].items()) {
      if (!file.is_string()) {
        throw ValidationError("manifest.json: query \"" + name +
                              "\" must be a file path");
      }
      require_file(root, file.get<std::string>(), "query");
      manifest.queries[name] = file.get<std::string>();
    }
  }

  auto known_service = [&](const std::string& service) {
    return manifest.descriptions.count(service) != 0;
  };

  if (!doc.contains("resources") || !doc["resources"].is_array() ||
      doc["resources"].empty()) {
    throw ValidationError(
        "manifest.json: \"resources\" must list at least one resource");
  }
  std::set<std::pair<std::string, std::string>> taken;
  for (const json& node : doc["resources"]) {
    FixtureResource entry;
    entry.service = require_string(node, "service", "resource entry");
    entry.path = require_string(node, "path", "resource entry");
    entry.file = require_string(node, "file", "resource entry");
    entry.media_type = require_string(node, "media_type", "resource entry");
    entry.type_id = require_string(node, "type", "resource entry");
    if (!known_service(entry.service)) {
      throw ValidationError("manifest.json: resource on unknown service \"" +
                            entry.service + "\"");
    }
    require_file(root, entry.file, "resource");
    if (!taken.insert({entry.service, entry.path}).second) {
      throw ValidationError("manifest.json: duplicate route " + entry.service +
                            " " + entry.path);
    }
    manifest.resources.push_back(std::move(entry));
  }

  if (doc.contains("redirects")) {
    if (!doc["redirects"].is_array()) {
      throw ValidationError("manifest.json: \"redirects\" must be an array");
    }
    for (const json& node : doc["redirects"]) {
      FixtureRedirect entry;
      entry.service = require_string(node, "service", "redirect entry");
      entry.path = require_string(node, "path", "redirect entry");
      entry.target = require_string(node, "target", "redirect entry");
      if (node.contains("status")) {
        if (!node["status"].is_number_integer()) {
          throw ValidationError("manifest.json: redirect status must be an "
                                "integer");
        }
        entry.status = node["status"].get<int>();
        if (entry.status < 300 || entry.status > 399) {
          throw ValidationError("manifest.json: redirect status " +
                                std::to_string(entry.status) +
                                " is not a redirect code");
        }
      }
      if (!known_service(entry.service)) {
        throw ValidationError("manifest.json: redirect on unknown service \"" +
                              entry.service + "\"");
      }
      if (!taken.insert({entry.service, entry.path}).second) {
        throw ValidationError("manifest.json: duplicate route " +
                              entry.service + " " + entry.path);
      }
      manifest.redirects.push_back(std::move(entry));
    }
  }

  if (doc.contains("scenarios")) {
    if (!doc["scenarios"].is_object()) {
      throw ValidationError("manifest.json: \"scenarios\" must be an object");
    }
    for (const auto& [name, node] : doc["scenarios"].items()) {
      Scenario scenario;
      if (!node.contains("services") || !node["services"].is_array() ||
          node["services"].empty()) {
        throw ValidationError("manifest.json: scenario \"" + name +
                              "\" needs a non-empty \"services\" list");
      }
      for (const json& service : node["services"]) {
        if (!service.is_string() ||
            !known_service(service.get<std::string>())) {
          throw ValidationError("manifest.json: scenario \"" + name +
                                "\" names an unknown service");
        }
        scenario.services.push_back(service.get<std::string>());
      }
      if (!node.contains("seeds") || !node["seeds"].is_array() ||
          node["seeds"].empty()) {
        throw ValidationError("manifest.json: scenario \"" + name +
                              "\" needs a non-empty \"seeds\" list");
      }
      for (const json& seed : node["seeds"]) {
        ScenarioSeed s;
        s.service = require_string(seed, "service", "seed entry");
        s.path = require_string(seed, "path", "seed entry");
        if (!known_service(s.service)) {
          throw ValidationError("manifest.json: scenario \"" + name +
                                "\" seeds an unknown service");
        }
        scenario.seeds.push_back(std::move(s));
      }
      if (node.contains("expected")) {
        for (const auto& [key, value] : node["expected"].items()) {
          if (!value.is_number_unsigned()) {
            throw ValidationError("manifest.json: scenario \"" + name +
                                  "\" expected count \"" + key +
                                  "\" must be a non-negative integer");
          }
          scenario.expected[key] = value.get<std::size_t>();
        }
      }
      if (node.contains("per_type")) {
        for (const auto& [key, value] : node["per_type"].items()) {
          if (!value.is_number_unsigned()) {
            throw ValidationError("manifest.json: scenario \"" + name +
                                  "\" per_type count \"" + key +
                                  "\" must be a non-negative integer");
          }
          scenario.expected_per_type[key] = value.get<std::size_t>();
        }
      }
      if (node.contains("cameras")) {
        for (const json& camera : node["cameras"]) {
          if (!camera.is_string()) {
            throw ValidationError("manifest.json: scenario \"" + name +
                                  "\" cameras must be strings");
          }
          scenario.expected_cameras.push_back(camera.get<std::string>());
        }
        std::sort(scenario.expected_cameras.begin(),
                  scenario.expected_cameras.end());
      }
      manifest.scenarios[name] = std::move(scenario);
    }
  }

  return manifest;
}

// ---------------------------------------------------------------------------
// HTTP server

namespace {

std::string iso_timestamp(std::chrono::system_clock::time_point at) {
  std::time_t t = std::chrono::system_clock::to_time_t(at);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string substitute(std::string body,
                       const std::map<std::string, std::string>& bases) {
  for (const auto& [key, base] : bases) {
    std::string token = "@@" + key + "@@";
    std::size_t pos = 0;
    while ((pos = body.find(token, pos)) != std::string::npos) {
      body.replace(pos, token.size(), base);
      pos += base.size();
    }
  }
  return body;
}

}  // namespace

struct FixtureServer::Impl {
  std::string service;
  std::map<std::string, const FixtureResource*> resources;  // by target
  std::map<std::string, const FixtureRedirect*> redirects;
  std::map<std::string, std::string> bodies;  // file -> raw content
  CorpusManifest manifest;

  httplib::Server server;
  std::thread worker;
  int bound_port = 0;

  mutable std::mutex mutex;
  std::map<std::string, std::string> substitutions;
  std::string log_file;
  std::vector<FixtureRequest> log;

  void handle(const httplib::Request& req, httplib::Response& res) {
    FixtureRequest event{req.method, req.target,
                         std::chrono::system_clock::now()};
    std::map<std::string, std::string> bases;
    {
      std::lock_guard<std::mutex> lock(mutex);
      log.push_back(event);
      if (!log_file.empty()) {
        std::ofstream out(log_file, std::ios::app);
        out << event.method << " " << event.target << " "
            << iso_timestamp(event.at) << "\n";
      }
      bases = substitutions;
    }

    if (auto it = redirects.find(req.target); it != redirects.end()) {
      res.status = it->second->status;
      res.set_header("Location", it->second->target);
      return;
    }
    if (auto it = resources.find(req.target); it != resources.end()) {
      res.status = 200;
      res.set_content(substitute(bodies.at(it->second->file), bases),
                      it->second->media_type);
      return;
    }
    res.status = 404;
    res.set_content("not found", "text/plain");
  }
};

FixtureServer::FixtureServer(CorpusManifest manifest, std::string service)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  impl_->manifest = std::move(manifest);

  bool any = false;
  for (const FixtureResource& entry : impl_->manifest.resources) {
    if (entry.service != impl_->service) continue;
    impl_->resources[entry.path] = &entry;
    impl_->bodies[entry.file] =
        read_file(fs::path(impl_->manifest.corpus_dir) / entry.file);
    any = true;
  }
  for (const FixtureRedirect& entry : impl_->manifest.redirects) {
    if (entry.service != impl_->service) continue;
    impl_->redirects[entry.path] = &entry;
    any = true;
  }
  if (!any) {
    throw ConfigError("service \"" + impl_->service +
                      "\" has no routes in the corpus manifest");
  }

  impl_->server.Get(".*", [impl = impl_.get()](const httplib::Request& req,
                                               httplib::Response& res) {
    impl->handle(req, res);
  });
}

FixtureServer::~FixtureServer() { stop(); }

void FixtureServer::set_substitution(const std::string& key,
                                     const std::string& base) {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  impl_->substitutions[key] = base;
}

void FixtureServer::set_log_file(const std::string& path) {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  impl_->log_file = path;
}

int FixtureServer::start(int port) {
  if (impl_->worker.joinable()) {
    throw ConfigError("fixture server already running");
  }
  if (port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->bound_port <= 0) {
      throw ConfigError("cannot bind a port on 127.0.0.1");
    }
  } else {
    if (!impl_->server.bind_to_port("127.0.0.1", port)) {
      throw ConfigError("cannot bind 127.0.0.1:" + std::to_string(port));
    }
    impl_->bound_port = port;
  }
  impl_->worker = std::thread([impl = impl_.get()] {
    impl->server.listen_after_bind();
  });
  impl_->server.wait_until_ready();
  return impl_->bound_port;
}

void FixtureServer::stop() {
  if (!impl_->worker.joinable()) return;
  impl_->server.stop();
  impl_->worker.join();
}

int FixtureServer::port() const { return impl_->bound_port; }

std::string FixtureServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->bound_port);
}

std::vector<FixtureRequest> FixtureServer::request_log() const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  return impl_->log;
}

void FixtureServer::clear_request_log() {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  impl_->log.clear();
}

// ---------------------------------------------------------------------------
// Offline selfcheck

namespace {

// The corpus mounted on synthetic hosts ("http://<service>.fixture.test"),
// so the walk needs no sockets.  The descriptions are host-agnostic, which
// makes counts on synthetic hosts equal to counts against live servers.
struct OfflineCorpus {
  std::map<std::string, std::string> bases;                 // service -> base
  std::map<std::string, const FixtureResource*> by_uri;     // normalized
  std::map<std::string, const FixtureRedirect*> redirects;  // normalized
  std::map<std::string, std::string> bodies;  // file -> substituted content
};

struct WalkEntry {
  std::string uri;
  std::string service_id;
  std::string type_id;
};

// Mirror of the live fetch: follow the manifest's redirect table, then
// serve the declared body with a 200 or fall through to a 404.
CrawlRecord offline_fetch(const OfflineCorpus& corpus, const WalkEntry& entry) {
  CrawlRecord record;
  record.request_uri = entry.uri;
  record.service_id = entry.service_id;
  record.type_id = entry.type_id;

  std::string current = entry.uri;
  std::set<std::string> chain = {current};
  for (;;) {
    auto hop = corpus.redirects.find(current);
    if (hop == corpus.redirects.end()) break;
    auto resolved = resolve_reference(current, hop->second->target);
    if (!resolved) {
      record.status = hop->second->status;
      record.error = "unresolvable redirect Location: " + hop->second->target;
      break;
    }
    std::string next;
    try {
      next = normalize_uri(*resolved);
    } catch (const UriError& e) {
      record.status = hop->second->status;
      record.error = std::string("bad redirect target: ") + e.what();
      break;
    }
    if (!chain.insert(next).second) {
      record.error = "redirect loop through " + next;
      break;
    }
    ++record.redirects;
    current = next;
  }
  record.final_uri = current;

  if (record.error.empty()) {
    auto it = corpus.by_uri.find(current);
    if (it != corpus.by_uri.end()) {
      record.status = 200;
      record.media_type = media_type_base(it->second->media_type);
      record.body = corpus.bodies.at(it->second->file);
    } else {
      record.status = 404;
      record.media_type = "text/plain";
      record.body = "not found";
    }
  }
  record.body_digest = sha256(record.body);
  record.fetched_at = std::chrono::system_clock::now();
  return record;
}

// Mirror of the crawler's link extraction: same representation choice,
// same parse, same classification.
void offline_extract(CrawlRecord& record,
                     const std::vector<RellDescription>& descriptions) {
  const RellDescription* owner = nullptr;
  const ResourceType* type = nullptr;
  for (const auto& desc : descriptions) {
    if (desc.service_id == record.service_id) {
      owner = &desc;
      type = desc.find_resource(record.type_id);
    }
  }
  if (!owner || !type || type->representations.empty()) return;

  const RepresentationSpec* rep = nullptr;
  for (const auto& candidate : type->representations) {
    if (media_type_base(candidate.media_type) == record.media_type) {
      rep = &candidate;
      break;
    }
  }
  if (!rep) {
    rep = &type->representations.front();
    record.media_type_mismatch = true;
  }
  record.representation_id = rep->id;

  std::optional<DocTree> tree;
  try {
    tree = parse_document(record.body, rep->media_type);
  } catch (const XmlError& e) {
    record.error = std::string("body parse: ") + e.what();
    return;
  }
  if (!tree) return;

  for (const LinkSpec& link : rep->links) {
    std::vector<std::string> values = evaluate(link.selector, *tree);
    for (const std::string& value : values) {
      LinkOccurrence occ;
      occ.link_id = link.id;
      occ.link_type = link.link_type.value_or("");
      occ.raw_value = value;
      if (link.protocol) occ.method = link.protocol->method;

      auto resolved = resolve_reference(record.final_uri, value);
      if (resolved) {
        try {
          occ.absolute_uri = normalize_uri(*resolved);
        } catch (const UriError&) {
          occ.absolute_uri.clear();
        }
      }
      occ.target =
          classify_link(occ.absolute_uri, link, *owner, record.type_id);
      record.links.push_back(std::move(occ));
    }
  }
}

struct ScenarioComputation {
  CrawlSummary summary;
  std::size_t skipped = 0;
  std::size_t schema_quads = 0;
  std::size_t type_quads = 0;
  std::size_t link_quads = 0;
  std::size_t attribute_quads = 0;
  std::size_t sameas_quads = 0;
  std::size_t provenance_quads = 0;
  std::size_t identity_warnings = 0;
  QuadStore store;
};

// The crawl loop of the live crawler, minus HTTP: breadth-first, seen-set
// admission, post-redirect identity marking, GET-only following.
ScenarioComputation walk_scenario(const OfflineCorpus& corpus,
                                  const std::vector<RellDescription>& descs,
                                  const ExtractionRuleSet& rules,
                                  const Scenario& scenario,
                                  std::vector<std::string>& problems,
                                  const std::string& label) {
  ScenarioComputation result;

  result.schema_quads += emit_upper_ontology(result.store);
  result.schema_quads += emit_media_type_taxonomy(result.store);
  for (const RellDescription& desc : descs) {
    result.schema_quads += emit_domain_ontology(result.store, desc);
  }

  std::vector<WalkEntry> queue;
  std::size_t head = 0;
  std::set<std::string> seen;
  std::set<std::string> out_of_scope_uris;

  for (const ScenarioSeed& seed : scenario.seeds) {
    std::string uri = normalize_uri(corpus.bases.at(seed.service) + seed.path);
    auto resolved = resolve_resource_type(descs, uri);
    if (!resolved) {
      problems.push_back("scenario " + label + ": seed " + uri +
                         " matches no described resource type");
      continue;
    }
    if (seen.insert(uri).second) {
      queue.push_back({uri, resolved->first, resolved->second});
    }
  }

  while (head < queue.size()) {
    CrawlRecord record = offline_fetch(corpus, queue[head]);
    ++head;
    if (record.status >= 200 && record.status < 300) {
      offline_extract(record, descs);
    }

    ++result.summary.fetched;
    ++result.summary.per_status[record.status];
    ++result.summary.per_type[record.service_id + "/" + record.type_id];
    if (record.media_type_mismatch) ++result.summary.media_type_mismatches;
    seen.insert(record.final_uri);

    for (LinkOccurrence& occ : record.links) {
      switch (occ.target.kind) {
        case LinkClass::invalid:
          ++result.summary.invalid_links;
          break;
        case LinkClass::out_of_scope:
          out_of_scope_uris.insert(occ.absolute_uri);
          break;
        case LinkClass::in_scope:
        case LinkClass::collection_self:
          if (occ.method != "GET") break;
          if (seen.insert(occ.absolute_uri).second) {
            queue.push_back({occ.absolute_uri, occ.target.service_id,
                             occ.target.type_id});
            occ.followed = true;
          }
          break;
      }
    }

    RecordEmission emitted = emit_record(result.store, record, descs, rules);
    if (emitted.skipped) ++result.skipped;
    result.type_quads += emitted.type_quads;
    result.link_quads += emitted.link_quads;
    result.attribute_quads += emitted.attribute_quads;
    result.sameas_quads += emitted.sameas_quads;
    result.provenance_quads += emitted.provenance_quads;
    for (const std::string& warning : emitted.warnings) {
      if (warning.find("identity group") != std::string::npos) {
        ++result.identity_warnings;
      }
    }
  }

  result.summary.out_of_scope = out_of_scope_uris.size();
  return result;
}

}  // namespace

SelfCheckReport selfcheck_corpus(const std::string& corpus_dir) {
  SelfCheckReport report;

  CorpusManifest manifest;
  try {
    manifest = load_manifest(corpus_dir);
  } catch (const Error& e) {
    report.problems.push_back(e.what());
    return report;
  }

  fs::path root(manifest.corpus_dir);
  std::vector<RellDescription> descriptions;
  std::map<std::string, const RellDescription*> description_by_service;
  try {
    for (const auto& [service, file] : manifest.descriptions) {
      RellDescription desc = parse_description(read_file(root / file));
      if (desc.service_id != service) {
        report.problems.push_back("description " + file + ": service id \"" +
                                  desc.service_id +
                                  "\" does not match manifest key \"" +
                                  service + "\"");
      }
      descriptions.push_back(std::move(desc));
    }
  } catch (const Error& e) {
    report.problems.push_back(e.what());
    return report;
  }
  for (const RellDescription& desc : descriptions) {
    description_by_service[desc.service_id] = &desc;
  }

  ExtractionRuleSet rules;
  if (!manifest.transforms_file.empty()) {
    try {
      rules = parse_extraction_rules(
          read_file(root / manifest.transforms_file));
    } catch (const Error& e) {
      report.problems.push_back(std::string("transforms: ") + e.what());
      return report;
    }
  }

  OfflineCorpus corpus;
  for (const auto& [service, file] : manifest.descriptions) {
    (void)file;
    corpus.bases[service] = "http://" + service + ".fixture.test";
  }
  for (const FixtureResource& entry : manifest.resources) {
    std::string uri = normalize_uri(corpus.bases.at(entry.service) +
                                    entry.path);
    corpus.by_uri[uri] = &entry;
    if (!corpus.bodies.count(entry.file)) {
      corpus.bodies[entry.file] =
          substitute(read_file(root / entry.file), corpus.bases);
    }

    // Every declared route must land in its own service's description,
    // on the type the manifest claims.
    auto resolved = resolve_resource_type(descriptions, uri);
    if (!resolved) {
      report.problems.push_back("resource " + entry.service + " " +
                                entry.path +
                                ": matches no described resource type");
    } else if (resolved->first != entry.service ||
               resolved->second != entry.type_id) {
      report.problems.push_back(
          "resource " + entry.service + " " + entry.path + ": resolves to " +
          resolved->first + "/" + resolved->second + ", manifest says " +
          entry.service + "/" + entry.type_id);
    }

    // A document body that does not parse under its declared media type is
    // an authoring mistake, not a robustness fixture.
    try {
      parse_document(corpus.bodies.at(entry.file), entry.media_type);
    } catch (const XmlError& e) {
      report.problems.push_back("resource " + entry.service + " " +
                                entry.path + ": body does not parse: " +
                                e.what());
    }
  }
  for (const FixtureRedirect& entry : manifest.redirects) {
    std::string uri = normalize_uri(corpus.bases.at(entry.service) +
                                    entry.path);
    corpus.redirects[uri] = &entry;
    if (!resolve_resource_type(descriptions, uri)) {
      report.problems.push_back("redirect " + entry.service + " " +
                                entry.path +
                                ": matches no described resource type, so "
                                "the crawler can never request it");
    }
  }

  for (const auto& [name, scenario] : manifest.scenarios) {
    std::vector<RellDescription> scoped;
    for (const std::string& service : scenario.services) {
      scoped.push_back(*description_by_service.at(service));
    }

    ScenarioComputation computed =
        walk_scenario(corpus, scoped, rules, scenario, report.problems, name);

    std::vector<std::string> cameras;
    if (!scenario.expected_cameras.empty()) {
      auto query_file = manifest.queries.find("cameras");
      if (query_file == manifest.queries.end()) {
        report.problems.push_back("scenario " + name +
                                  ": expects cameras but the manifest has no "
                                  "\"cameras\" query");
      } else {
        try {
          BgpQuery query =
              parse_bgp_query(read_file(root / query_file->second));
          QueryResult rows = compose_and_query(computed.store, query);
          for (const auto& row : rows.rows) {
            for (const Term& term : row) cameras.push_back(term.value);
          }
          std::sort(cameras.begin(), cameras.end());
          cameras.erase(std::unique(cameras.begin(), cameras.end()),
                        cameras.end());
        } catch (const Error& e) {
          report.problems.push_back("scenario " + name + ": camera query: " +
                                    e.what());
        }
        if (cameras != scenario.expected_cameras) {
          auto join = [](const std::vector<std::string>& values) {
            std::string out;
            for (const std::string& value : values) {
              if (!out.empty()) out += ", ";
              out += value;
            }
            return out.empty() ? std::string("(none)") : out;
          };
          report.problems.push_back("scenario " + name +
                                    ": cameras: manifest says " +
                                    join(scenario.expected_cameras) +
                                    ", corpus yields " + join(cameras));
        }
        std::string joined;
        for (const std::string& camera : cameras) {
          if (!joined.empty()) joined += "|";
          joined += camera;
        }
        report.recomputed[name + ".cameras"] = joined;
      }
    }

    // Counts the store can answer directly.
    std::size_t total_quads = computed.store.size();
    std::size_t graphs = computed.store.graph_terms().size();
    std::size_t represents_quads =
        computed.store
            .match(QuadPattern{std::nullopt, vocab::rell_represents(),
                               std::nullopt, QuadPattern::GraphSel::any,
                               std::nullopt})
            .size();
    std::size_t inferred = subproperty_closure(computed.store);

    std::map<std::string, std::size_t> counts = {
        {"fetched", computed.summary.fetched},
        {"skipped", computed.skipped},
        {"out_of_scope", computed.summary.out_of_scope},
        {"invalid_links", computed.summary.invalid_links},
        {"media_type_mismatches", computed.summary.media_type_mismatches},
        {"schema_quads", computed.schema_quads},
        {"type_quads", computed.type_quads},
        {"link_quads", computed.link_quads},
        {"attribute_quads", computed.attribute_quads},
        {"sameas_quads", computed.sameas_quads},
        {"provenance_quads", computed.provenance_quads},
        {"represents_quads", represents_quads},
        {"graphs", graphs},
        {"identity_warnings", computed.identity_warnings},
        {"total_quads", total_quads},
        {"inferred_triples", inferred},
    };
    for (const auto& [status, count] : computed.summary.per_status) {
      counts["status." + std::to_string(status)] = count;
    }

    for (const auto& [key, expected] : scenario.expected) {
      std::size_t actual;
      if (auto it = counts.find(key); it != counts.end()) {
        actual = it->second;
      } else if (key.rfind("status.", 0) == 0) {
        actual = 0;  // a status class the walk never produced
      } else {
        report.problems.push_back("scenario " + name +
                                  ": unknown expected count \"" + key + "\"");
        continue;
      }
      report.recomputed[name + "." + key] = std::to_string(actual);
      if (actual != expected) {
        report.problems.push_back(
            "scenario " + name + ": " + key + ": manifest says " +
            std::to_string(expected) + ", corpus yields " +
            std::to_string(actual));
      }
    }

    if (!scenario.expected_per_type.empty()) {
      for (const auto& [key, expected] : scenario.expected_per_type) {
        std::size_t actual = 0;
        if (auto it = computed.summary.per_type.find(key);
            it != computed.summary.per_type.end()) {
          actual = it->second;
        }
        report.recomputed[name + ".type." + key] = std::to_string(actual);
        if (actual != expected) {
          report.problems.push_back(
              "scenario " + name + ": type " + key + ": manifest says " +
              std::to_string(expected) + ", corpus yields " +
              std::to_string(actual));
        }
      }
      for (const auto& [key, actual] : computed.summary.per_type) {
        if (!scenario.expected_per_type.count(key)) {
          report.problems.push_back("scenario " + name + ": type " + key +
                                    ": corpus yields " +
                                    std::to_string(actual) +
                                    ", missing from the manifest");
        }
      }
    }
  }

  report.ok = report.problems.empty();
  return report;
}

}  // namespace rell
