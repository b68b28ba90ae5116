// The fixture corpus: a set of small synthetic services (a school site,
// a feed service, a photo site, and an identity glue service) served over
// local HTTP for the acceptance suite.
//
// A JSON manifest in the corpus directory declares every resource (path,
// file, media type, resource type), the redirect routes, and per-scenario
// seeds with expected harvest counts.  Those counts are the oracle the
// acceptance criteria compare against; selfcheck_corpus recomputes them
// from the corpus files by an offline breadth-first walk and reports any
// disagreement, so the manifest can never drift from the content.
//
// Bodies may contain @@service@@ placeholders (e.g. "@@school@@") that the
// server replaces with configured base URLs at request time; the identity
// document uses these to name resources across services.

#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rell/model.hpp"

namespace rell {

struct FixtureResource {
  std::string service;
  std::string path;  // request target, query string included
  std::string file;  // body file, relative to the corpus directory
  std::string media_type;
  std::string type_id;  // described resource type
};

struct FixtureRedirect {
  std::string service;
  std::string path;
  std::string target;  // redirect location, relative to the service root
  int status = 301;
};

struct ScenarioSeed {
  std::string service;
  std::string path;
};

struct Scenario {
  std::vector<std::string> services;  // descriptions in play
  std::vector<ScenarioSeed> seeds;
  std::map<std::string, std::size_t> expected;  // named counts
  std::map<std::string, std::size_t> expected_per_type;  // "service/type"
  std::vector<std::string> expected_cameras;  // literal values, sorted
};

struct CorpusManifest {
  std::string corpus_dir;
  std::map<std::string, std::string> descriptions;  // service -> file
  std::string transforms_file;
  std::map<std::string, std::string> queries;  // name -> file
  std::vector<FixtureResource> resources;
  std::vector<FixtureRedirect> redirects;
  std::map<std::string, Scenario> scenarios;
};

// Reads and validates manifest.json in the corpus directory.  Throws
// ValidationError on a missing or malformed manifest, missing files, or
// references to unknown services.
CorpusManifest load_manifest(const std::string& corpus_dir);

struct FixtureRequest {
  std::string method;
  std::string target;
  std::chrono::system_clock::time_point at;
};

// One service's slice of the corpus over HTTP on 127.0.0.1.
class FixtureServer {
 public:
  FixtureServer(CorpusManifest manifest, std::string service);
  ~FixtureServer();

  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  // "@@key@@" in served bodies becomes `base` (e.g. "http://127.0.0.1:80").
  void set_substitution(const std::string& key, const std::string& base);

  // Appends "METHOD target ISO-time" lines for every request.
  void set_log_file(const std::string& path);

  // Binds 127.0.0.1 (port 0 picks a free one), serves in a background
  // thread, and returns the bound port.  Throws ConfigError when the
  // port cannot be bound.
  int start(int port = 0);
  void stop();

  int port() const;
  std::string base_url() const;  // "http://127.0.0.1:<port>"

  std::vector<FixtureRequest> request_log() const;
  void clear_request_log();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SelfCheckReport {
  bool ok = false;
  std::vector<std::string> problems;
  // Recomputed values, keyed "scenario.count" (e.g. "school.link_quads"),
  // for display alongside the manifest.
  std::map<std::string, std::string> recomputed;
};

// Recomputes every expected count by an offline crawl simulation over the
// corpus files (no HTTP): the same admission, redirect, and classification
// semantics as the live crawler, the same mapping emission, and the same
// composed camera query.  ok iff every manifest number matches.
SelfCheckReport selfcheck_corpus(const std::string& corpus_dir);

}  // namespace rell
