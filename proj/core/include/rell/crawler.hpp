// Description-driven crawl engine.
//
// Starting from typed seed URIs, the crawler walks breadth-first over the
// resources a service description declares, fetches each at most once,
// classifies the links found in every representation, and hands one
// CrawlRecord per fetched resource to a sink.  Coverage is best-effort:
// only resources reachable from the seeds inside the budget are visited.

#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rell/digest.hpp"
#include "rell/model.hpp"

namespace rell {

struct CrawlConfig {
  std::vector<std::string> seeds;
  std::size_t max_resources = 100;
  std::chrono::milliseconds per_host_delay{0};
  int max_redirects = 5;  // capped at 10
  std::chrono::milliseconds timeout{5000};
  std::string user_agent = "rell-harvester/0.1";
  std::size_t concurrency = 1;
};

enum class LinkClass {
  in_scope,         // matches the declared target type; will be followed
  collection_self,  // paging link: more of the same collection
  out_of_scope,     // leaves the described service; never fetched
  invalid,          // value did not resolve to an absolute URI
};

// Where a link leads, as decided by classify_link.
struct LinkTarget {
  LinkClass kind = LinkClass::out_of_scope;
  std::string service_id;  // set for in_scope and collection_self
  std::string type_id;
};

// One link value found in a fetched representation.
struct LinkOccurrence {
  std::string link_id;
  std::string link_type;       // declared linktype id, may be empty
  std::string raw_value;       // as written in the document
  std::string absolute_uri;    // resolved + normalized; empty when invalid
  LinkTarget target;
  std::string method = "GET";  // from the protocol hint
  bool followed = false;       // admitted to the frontier by this occurrence
};

struct CrawlRecord {
  std::string request_uri;  // normalized URI taken from the frontier
  std::string final_uri;    // post-redirect identity, normalized
  std::string service_id;
  std::string type_id;
  int status = 0;          // HTTP status; 0 = transport failure
  std::string error;       // transport failure detail
  std::string media_type;  // response Content-Type, parameters stripped
  bool media_type_mismatch = false;  // no declared representation matched
  std::string representation_id;     // the representation used for links
  std::string body;
  Sha256 body_digest{};
  std::vector<LinkOccurrence> links;
  int redirects = 0;
  std::chrono::system_clock::time_point fetched_at;
};

struct CrawlSummary {
  std::size_t fetched = 0;  // records produced (= budget consumed)
  std::map<std::string, std::size_t> per_type;  // "service/type" -> count
  std::map<int, std::size_t> per_status;
  std::size_t out_of_scope = 0;  // distinct out-of-scope URIs skipped
  std::size_t invalid_links = 0;
  std::size_t media_type_mismatches = 0;
};

// Pure classification of one resolved link value.  `owner` is the
// description whose representation declared `spec`; `current_type_id` is
// the type of the resource the link was found on (the continuation type
// for collection links).  An empty `normalized_uri` marks a value that
// did not resolve.
LinkTarget classify_link(const std::string& normalized_uri,
                         const LinkSpec& spec, const RellDescription& owner,
                         const std::string& current_type_id);

// One timestamped HTTP request, for politeness and at-most-once checks.
struct FetchEvent {
  std::string host;  // politeness key: lowercase host:port
  std::string uri;
  std::chrono::steady_clock::time_point at;
};

class Crawler {
 public:
  // Throws ConfigError for a config violating its invariants.
  Crawler(std::vector<RellDescription> descriptions, CrawlConfig config);

  // Runs the crawl; the sink sees every record exactly once, in a
  // deterministic order.  Seeds are resolved up front: one that matches
  // no described resource type throws ConfigError before any fetch
  // (AmbiguityError when it matches several).  May be called once per
  // Crawler.
  CrawlSummary run(const std::function<void(const CrawlRecord&)>& sink);

  // Every HTTP request made, redirect hops included, in request order.
  const std::vector<FetchEvent>& trace() const { return trace_; }

 private:
  struct QueueEntry {
    std::string uri;  // normalized
    std::string service_id;
    std::string type_id;
  };

  CrawlRecord process(const QueueEntry& entry);
  void fetch_into(CrawlRecord& record, const QueueEntry& entry);
  void extract_links(CrawlRecord& record);
  std::chrono::steady_clock::time_point reserve_slot(const std::string& host,
                                                     const std::string& uri);

  std::vector<RellDescription> descriptions_;
  CrawlConfig config_;

  std::mutex politeness_mu_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_allowed_;
  std::vector<FetchEvent> trace_;
};

// Convenience wrapper: build a Crawler, run it, return the summary.
CrawlSummary crawl(std::vector<RellDescription> descriptions,
                   CrawlConfig config,
                   const std::function<void(const CrawlRecord&)>& sink);

}  // namespace rell
