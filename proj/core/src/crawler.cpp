#include "rell/crawler.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <thread>

#include "httplib.h"
#include "rell/diag.hpp"
#include "rell/doc.hpp"
#include "rell/selector.hpp"
#include "rell/uri.hpp"

namespace rell {
namespace {

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 ||
         status == 308;
}

// Accept header: the distinct media types declared for the type, in
// declaration order.
std::string accept_header(const ResourceType& type) {
  std::string out;
  std::vector<std::string> seen;
  for (const auto& rep : type.representations) {
    if (std::find(seen.begin(), seen.end(), rep.media_type) != seen.end()) {
      continue;
    }
    seen.push_back(rep.media_type);
    if (!out.empty()) out += ", ";
    out += rep.media_type;
  }
  return out.empty() ? "*/*" : out;
}

}  // namespace

LinkTarget classify_link(const std::string& normalized_uri,
                         const LinkSpec& spec, const RellDescription& owner,
                         const std::string& current_type_id) {
  if (normalized_uri.empty()) return {LinkClass::invalid, "", ""};
  if (spec.kind == LinkSpec::Kind::collection) {
    // Paging: more of the collection the link was found on.
    return {LinkClass::collection_self, owner.service_id, current_type_id};
  }
  if (!spec.target) return {LinkClass::out_of_scope, "", ""};
  const ResourceType* target = owner.find_resource(*spec.target);
  if (!target) return {LinkClass::out_of_scope, "", ""};
  if (target->uri_pattern && !target->matches(normalized_uri)) {
    return {LinkClass::out_of_scope, "", ""};
  }
  return {LinkClass::in_scope, owner.service_id, target->id};
}

Crawler::Crawler(std::vector<RellDescription> descriptions, CrawlConfig config)
    : descriptions_(std::move(descriptions)), config_(std::move(config)) {
  if (config_.max_resources < 1) {
    throw ConfigError("max_resources must be at least 1");
  }
  if (config_.max_redirects < 0 || config_.max_redirects > 10) {
    throw ConfigError("max_redirects must be between 0 and 10");
  }
  if (config_.concurrency < 1) {
    throw ConfigError("concurrency must be at least 1");
  }
  if (config_.per_host_delay.count() < 0) {
    throw ConfigError("per_host_delay must not be negative");
  }
  if (config_.seeds.empty()) {
    throw ConfigError("at least one seed URI is required");
  }
}

std::chrono::steady_clock::time_point Crawler::reserve_slot(
    const std::string& host, const std::string& uri) {
  std::unique_lock<std::mutex> lock(politeness_mu_);
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    auto it = next_allowed_.find(host);
    if (it == next_allowed_.end() || now >= it->second) {
      next_allowed_[host] = now + config_.per_host_delay;
      trace_.push_back({host, uri, now});
      return now;
    }
    auto wake = it->second;
    lock.unlock();
    std::this_thread::sleep_until(wake);
    lock.lock();
  }
}

void Crawler::fetch_into(CrawlRecord& record, const QueueEntry& entry) {
  const ResourceType* type = nullptr;
  for (const auto& desc : descriptions_) {
    if (desc.service_id == entry.service_id) {
      type = desc.find_resource(entry.type_id);
    }
  }
  std::string accept = type ? accept_header(*type) : "*/*";

  std::string current = entry.uri;
  std::set<std::string> chain = {current};
  for (;;) {
    auto parsed = parse_uri(current);
    if (!parsed) {
      record.error = "unparseable URI: " + current;
      break;
    }
    if (parsed->scheme != "http") {
      record.error = "unsupported scheme for fetch: " + parsed->scheme;
      break;
    }
    int port = parsed->port.empty() ? 80 : std::stoi(parsed->port);
    std::string host_key = parsed->host + ":" + std::to_string(port);

    reserve_slot(host_key, current);

    httplib::Client client(parsed->host, port);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    httplib::Headers headers = {
        {"Accept", accept},
        {"User-Agent", config_.user_agent},
    };
    std::string target = parsed->path;
    if (parsed->query) target += "?" + *parsed->query;

    auto response = client.Get(target, headers);
    if (!response) {
      record.error = "fetch failed: " + httplib::to_string(response.error());
      break;
    }

    if (is_redirect(response->status) && response->has_header("Location")) {
      std::string location = response->get_header_value("Location");
      auto resolved = resolve_reference(current, location);
      if (!resolved) {
        record.status = response->status;
        record.error = "unresolvable redirect Location: " + location;
        break;
      }
      std::string next;
      try {
        next = normalize_uri(*resolved);
      } catch (const UriError& e) {
        record.status = response->status;
        record.error = std::string("bad redirect target: ") + e.what();
        break;
      }
      if (!chain.insert(next).second) {
        record.error = "redirect loop through " + next;
        break;
      }
      ++record.redirects;
      if (record.redirects > config_.max_redirects) {
        record.error = "redirect limit exceeded";
        break;
      }
      current = next;
      continue;
    }

    record.status = response->status;
    record.media_type = media_type_base(response->get_header_value("Content-Type"));
    record.body = response->body;
    break;
  }

  record.final_uri = current;
  record.body_digest = sha256(record.body);
  record.fetched_at = std::chrono::system_clock::now();
}

void Crawler::extract_links(CrawlRecord& record) {
  const RellDescription* owner = nullptr;
  const ResourceType* type = nullptr;
  for (const auto& desc : descriptions_) {
    if (desc.service_id == record.service_id) {
      owner = &desc;
      type = desc.find_resource(record.type_id);
    }
  }
  if (!owner || !type || type->representations.empty()) return;

  // Pick the representation whose declared media type matches the
  // response; otherwise fall back to the first declared one and flag the
  // mismatch (extraction still runs with its link specs).
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
    // Extraction runs under the chosen representation's declared media
    // type; on a mismatch this is the documented best-effort attempt.
    tree = parse_document(record.body, rep->media_type);
  } catch (const XmlError& e) {
    record.error = std::string("body parse: ") + e.what();
    return;
  }
  if (!tree) return;  // not a document media type; nothing to extract

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

CrawlRecord Crawler::process(const QueueEntry& entry) {
  CrawlRecord record;
  record.request_uri = entry.uri;
  record.service_id = entry.service_id;
  record.type_id = entry.type_id;
  fetch_into(record, entry);
  if (record.status >= 200 && record.status < 300) {
    extract_links(record);
  }
  return record;
}

CrawlSummary Crawler::run(const std::function<void(const CrawlRecord&)>& sink) {
  std::vector<QueueEntry> queue;
  std::size_t head = 0;
  std::set<std::string> seen;
  std::set<std::string> out_of_scope_uris;
  CrawlSummary summary;

  for (const std::string& seed : config_.seeds) {
    std::string normalized;
    try {
      normalized = normalize_uri(seed);
    } catch (const UriError& e) {
      throw ConfigError("seed \"" + seed + "\": " + e.what());
    }
    auto resolved = resolve_resource_type(descriptions_, normalized);
    if (!resolved) {
      throw ConfigError("seed \"" + seed +
                        "\" matches no described resource type");
    }
    if (seen.insert(normalized).second) {
      queue.push_back({normalized, resolved->first, resolved->second});
    }
  }

  while (head < queue.size() && summary.fetched < config_.max_resources) {
    std::size_t batch = std::min({config_.concurrency,
                                  config_.max_resources - summary.fetched,
                                  queue.size() - head});

    std::vector<CrawlRecord> records;
    if (batch == 1) {
      records.push_back(process(queue[head]));
    } else {
      std::vector<std::future<CrawlRecord>> futures;
      for (std::size_t i = 0; i < batch; ++i) {
        futures.push_back(std::async(std::launch::async, [this, &queue, head,
                                                          i]() {
          return process(queue[head + i]);
        }));
      }
      for (auto& f : futures) records.push_back(f.get());
    }
    head += batch;

    // Serialized phase: admission, counting, and sink delivery, in
    // dispatch order.
    for (CrawlRecord& record : records) {
      ++summary.fetched;
      ++summary.per_status[record.status];
      ++summary.per_type[record.service_id + "/" + record.type_id];
      if (record.media_type_mismatch) ++summary.media_type_mismatches;
      // The post-redirect URI is the resource's identity; a later direct
      // discovery of it must not fetch again.
      seen.insert(record.final_uri);

      for (LinkOccurrence& occ : record.links) {
        switch (occ.target.kind) {
          case LinkClass::invalid:
            ++summary.invalid_links;
            break;
          case LinkClass::out_of_scope:
            out_of_scope_uris.insert(occ.absolute_uri);
            break;
          case LinkClass::in_scope:
          case LinkClass::collection_self:
            if (occ.method != "GET") break;  // declared, never followed
            if (seen.insert(occ.absolute_uri).second) {
              queue.push_back({occ.absolute_uri, occ.target.service_id,
                               occ.target.type_id});
              occ.followed = true;
            }
            break;
        }
      }
      sink(record);
    }
  }

  summary.out_of_scope = out_of_scope_uris.size();
  return summary;
}

CrawlSummary crawl(std::vector<RellDescription> descriptions,
                   CrawlConfig config,
                   const std::function<void(const CrawlRecord&)>& sink) {
  Crawler crawler(std::move(descriptions), std::move(config));
  return crawler.run(sink);
}

}  // namespace rell
