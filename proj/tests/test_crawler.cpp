// Crawl engine tests against an in-process HTTP server.  The server's
// request log is the oracle for the at-most-once and scope invariants.

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "rell/crawler.hpp"
#include "rell/diag.hpp"
#include "rell/model.hpp"
#include "rell/uri.hpp"

using namespace rell;

namespace {

// Minimal server wrapper: routes are registered on `svr` before start().
class TestServer {
 public:
  ~TestServer() { stop(); }

  void start() {
    port_ = svr.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      svr.stop();
      thread_.join();
    }
  }

  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::vector<std::string> log() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
  }

  void record(const httplib::Request& req) {
    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(req.method + " " + req.target);
  }

  httplib::Server svr;

 private:
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::vector<std::string> log_;
};

// A small described service: an index page linking people, with one
// out-of-scope area, one opaque link, an optional paging link, and a
// declared-but-POST action link.
constexpr const char* kMiniDesc = R"(<?xml version="1.0"?>
<service xmlns="urn:rell:v1" id="mini" name="Mini">
  <linktype id="mini-rel" name="related"/>
  <resource id="idx" name="index">
    <uri match="http://[^/]+/idx/?(\?page=[0-9]+)?"/>
    <representation id="idx-html" mediatype="text/html">
      <link id="idx-person" type="mini-rel" target="person">
        <selector xpath="//a[@class='person']/@href"/>
      </link>
      <link id="idx-ext" type="mini-rel">
        <selector xpath="//a[@class='ext']/@href"/>
      </link>
      <link id="idx-next" type="mini-rel" kind="collection">
        <selector xpath="//a[@rel='next']/@href"/>
      </link>
      <link id="idx-action" type="mini-rel" target="person">
        <selector xpath="//a[@class='action']/@href"/>
        <protocol scheme="http" method="POST"/>
      </link>
    </representation>
  </resource>
  <resource id="person" name="person">
    <uri match="http://[^/]+/p/[a-z]+"/>
    <representation id="person-html" mediatype="text/html">
      <link id="person-friend" type="mini-rel" target="person">
        <selector xpath="//a[@class='friend']/@href"/>
      </link>
    </representation>
  </resource>
</service>
)";

std::vector<RellDescription> mini_descs() {
  return {parse_description(kMiniDesc)};
}

void serve_html(TestServer& server, const std::string& path,
                const std::string& body) {
  server.svr.Get(path, [&server, body](const httplib::Request& req,
                                       httplib::Response& res) {
    server.record(req);
    res.set_content(body, "text/html");
  });
}

CrawlConfig config_with_seed(const std::string& seed) {
  CrawlConfig cfg;
  cfg.seeds = {seed};
  return cfg;
}

}  // namespace

TEST_CASE("classify_link") {
  auto descs = mini_descs();
  const RellDescription& mini = descs[0];
  const RepresentationSpec& idx_rep = mini.resources[0].representations[0];
  const LinkSpec& person_link = idx_rep.links[0];   // target=person
  const LinkSpec& ext_link = idx_rep.links[1];      // no target
  const LinkSpec& paging_link = idx_rep.links[2];   // kind=collection

  SUBCASE("matching target pattern is in scope") {
    auto t = classify_link("http://h/p/alice", person_link, mini, "idx");
    CHECK(t.kind == LinkClass::in_scope);
    CHECK(t.service_id == "mini");
    CHECK(t.type_id == "person");
  }

  SUBCASE("target pattern mismatch is out of scope") {
    auto t = classify_link("http://h/elsewhere", person_link, mini, "idx");
    CHECK(t.kind == LinkClass::out_of_scope);
  }

  SUBCASE("no declared target is out of scope") {
    auto t = classify_link("http://h/p/alice", ext_link, mini, "idx");
    CHECK(t.kind == LinkClass::out_of_scope);
  }

  SUBCASE("collection links continue the current type") {
    auto t = classify_link("http://h/idx?page=2", paging_link, mini, "idx");
    CHECK(t.kind == LinkClass::collection_self);
    CHECK(t.type_id == "idx");
  }

  SUBCASE("unresolved value is invalid") {
    auto t = classify_link("", person_link, mini, "idx");
    CHECK(t.kind == LinkClass::invalid);
  }

  SUBCASE("pattern-less target accepts any URI") {
    RellDescription free = parse_description(R"(<?xml version="1.0"?>
<service xmlns="urn:rell:v1" id="f" name="F">
  <resource id="a" name="a">
    <representation id="a-html" mediatype="text/html">
      <link id="a-b" target="b"><selector xpath="//a/@href"/></link>
    </representation>
  </resource>
  <resource id="b" name="b">
    <representation id="b-html" mediatype="text/html"/>
  </resource>
</service>
)");
    auto t = classify_link("http://anything/at/all",
                           free.resources[0].representations[0].links[0], free,
                           "a");
    CHECK(t.kind == LinkClass::in_scope);
    CHECK(t.type_id == "b");
  }
}

TEST_CASE("config and seed validation") {
  auto descs = mini_descs();

  CHECK_THROWS_AS(Crawler(descs, CrawlConfig{}), ConfigError);  // no seeds

  CrawlConfig cfg = config_with_seed("http://h/idx");
  cfg.max_resources = 0;
  CHECK_THROWS_AS(Crawler(descs, cfg), ConfigError);

  cfg = config_with_seed("http://h/idx");
  cfg.max_redirects = 11;
  CHECK_THROWS_AS(Crawler(descs, cfg), ConfigError);

  // Seeds are resolved before any fetch.
  Crawler relative(descs, config_with_seed("http://h/idx"));
  CHECK_THROWS_AS(
      Crawler(descs, config_with_seed("people/x")).run([](auto&) {}),
      ConfigError);
  CHECK_THROWS_AS(
      Crawler(descs, config_with_seed("http://h/unknown")).run([](auto&) {}),
      ConfigError);
}

TEST_CASE("crawl walks the link graph breadth-first") {
  TestServer server;
  serve_html(server, "/idx", R"(<html><body>
    <a class="person" href="/p/alice">Alice</a>
    <a class="person" href="/p/bob">Bob</a>
    <a class="person" href="/p/alice">Alice again</a>
    <a class="ext" href="/private/zone">internal but undeclared</a>
    <a class="ext" href="mailto:nobody@example.com">mail</a>
    <a class="action" href="/p/delete">dangerous</a>
  </body></html>)");
  serve_html(server, "/p/alice", R"(<html><body>
    <a class="friend" href="/p/carol">Carol</a>
  </body></html>)");
  serve_html(server, "/p/bob", "<html><body>no links</body></html>");
  serve_html(server, "/p/carol", "<html><body>leaf</body></html>");
  serve_html(server, "/private/zone", "<html><body>must not be hit</body></html>");
  server.start();

  std::vector<CrawlRecord> records;
  Crawler crawler(mini_descs(), config_with_seed(server.base() + "/idx"));
  CrawlSummary summary = crawler.run(
      [&](const CrawlRecord& r) { records.push_back(r); });

  CHECK(summary.fetched == 4);
  CHECK(summary.per_type["mini/idx"] == 1);
  CHECK(summary.per_type["mini/person"] == 3);
  CHECK(summary.per_status[200] == 4);
  CHECK(summary.out_of_scope == 1);   // /private/zone, deduplicated
  CHECK(summary.invalid_links == 1);  // the mailto value

  // Breadth-first dispatch order.
  REQUIRE(records.size() == 4);
  CHECK(records[0].final_uri == server.base() + "/idx");
  CHECK(records[1].final_uri == server.base() + "/p/alice");
  CHECK(records[2].final_uri == server.base() + "/p/bob");
  CHECK(records[3].final_uri == server.base() + "/p/carol");

  // The index record classified each occurrence.
  const CrawlRecord& idx = records[0];
  REQUIRE(idx.links.size() == 6);
  CHECK(idx.links[0].target.kind == LinkClass::in_scope);
  CHECK(idx.links[0].followed);
  CHECK(idx.links[1].target.kind == LinkClass::in_scope);
  CHECK(idx.links[2].target.kind == LinkClass::in_scope);
  CHECK_FALSE(idx.links[2].followed);  // duplicate of alice
  CHECK(idx.links[3].target.kind == LinkClass::out_of_scope);
  CHECK(idx.links[4].target.kind == LinkClass::invalid);
  CHECK(idx.links[4].absolute_uri.empty());
  // POST action link: in scope by pattern? No: /p/delete matches person's
  // pattern, but the method forbids following.
  CHECK(idx.links[5].method == "POST");
  CHECK_FALSE(idx.links[5].followed);

  // Oracle: the server log. At most once per URI, no out-of-scope, no
  // POST target, no mailto.
  auto log = server.log();
  std::set<std::string> distinct(log.begin(), log.end());
  CHECK(log.size() == distinct.size());
  CHECK(std::find(log.begin(), log.end(), "GET /private/zone") == log.end());
  CHECK(std::find(log.begin(), log.end(), "GET /p/delete") == log.end());
  CHECK(log.size() == 4);

  // Body digests are real.
  CHECK(records[2].body_digest == sha256(records[2].body));
}

TEST_CASE("budget limits the number of fetches") {
  TestServer server;
  serve_html(server, "/idx",
             R"(<html><body><a class="person" href="/p/a">A</a>
                <a class="person" href="/p/b">B</a></body></html>)");
  serve_html(server, "/p/a", "<html></html>");
  serve_html(server, "/p/b", "<html></html>");
  server.start();

  CrawlConfig cfg = config_with_seed(server.base() + "/idx");
  cfg.max_resources = 1;
  std::size_t count = 0;
  CrawlSummary summary =
      crawl(mini_descs(), cfg, [&](const CrawlRecord&) { ++count; });
  CHECK(count == 1);
  CHECK(summary.fetched == 1);
  CHECK(server.log().size() == 1);
}

TEST_CASE("collection paging links continue the same type") {
  TestServer server;
  server.svr.Get("/idx", [&server](const httplib::Request& req,
                                   httplib::Response& res) {
    server.record(req);
    if (req.get_param_value("page") == "2") {
      res.set_content(
          R"(<html><body><a class="person" href="/p/b">B</a></body></html>)",
          "text/html");
    } else {
      res.set_content(R"(<html><body>
        <a class="person" href="/p/a">A</a>
        <a rel="next" href="/idx?page=2">next</a>
      </body></html>)",
                      "text/html");
    }
  });
  serve_html(server, "/p/a", "<html></html>");
  serve_html(server, "/p/b", "<html></html>");
  server.start();

  std::vector<CrawlRecord> records;
  CrawlSummary summary =
      crawl(mini_descs(), config_with_seed(server.base() + "/idx"),
            [&](const CrawlRecord& r) { records.push_back(r); });

  CHECK(summary.per_type["mini/idx"] == 2);  // page 1 and page 2
  CHECK(summary.per_type["mini/person"] == 2);
  REQUIRE(records.size() == 4);
  CHECK(records[0].links[1].target.kind == LinkClass::collection_self);
  CHECK(records[0].links[1].target.type_id == "idx");
  // BFS: page 2 queued after /p/a, both pages' people fetched.
  CHECK(records[1].final_uri == server.base() + "/p/a");
  CHECK(records[2].final_uri == server.base() + "/idx?page=2");
}

TEST_CASE("redirects") {
  TestServer server;
  server.svr.Get("/old", [&server](const httplib::Request& req,
                                   httplib::Response& res) {
    server.record(req);
    res.status = 301;
    res.set_header("Location", "/p/alice");
  });
  // The self link only matters for the dedupe subcase; the others declare
  // no link specs, so it is inert there.
  serve_html(server, "/p/alice",
             R"(<html><body><a href="/p/alice">self</a></body></html>)");
  server.svr.Get("/loop1", [&server](const httplib::Request& req,
                                     httplib::Response& res) {
    server.record(req);
    res.status = 302;
    res.set_header("Location", "/loop2");
  });
  server.svr.Get("/loop2", [&server](const httplib::Request& req,
                                     httplib::Response& res) {
    server.record(req);
    res.status = 302;
    res.set_header("Location", "/loop1");
  });
  server.start();

  // The person pattern matches /p/<name>; widen the index pattern to the
  // redirect and loop entry points.
  RellDescription desc = parse_description(R"x(<?xml version="1.0"?>
<service xmlns="urn:rell:v1" id="r" name="R">
  <resource id="entry" name="entry">
    <uri match="http://[^/]+/(old|loop1)"/>
    <representation id="entry-html" mediatype="text/html"/>
  </resource>
</service>
)x");

  SUBCASE("single hop lands on the final URI") {
    CrawlConfig cfg = config_with_seed(server.base() + "/old");
    std::vector<CrawlRecord> records;
    crawl({desc}, cfg, [&](const CrawlRecord& r) { records.push_back(r); });
    REQUIRE(records.size() == 1);
    CHECK(records[0].request_uri == server.base() + "/old");
    CHECK(records[0].final_uri == server.base() + "/p/alice");
    CHECK(records[0].status == 200);
    CHECK(records[0].redirects == 1);
    CHECK(records[0].error.empty());
  }

  SUBCASE("a redirect loop is a fetch error, crawl continues") {
    CrawlConfig cfg = config_with_seed(server.base() + "/loop1");
    cfg.seeds.push_back(server.base() + "/old");
    std::vector<CrawlRecord> records;
    CrawlSummary summary =
        crawl({desc}, cfg, [&](const CrawlRecord& r) { records.push_back(r); });
    REQUIRE(records.size() == 2);
    CHECK(records[0].status == 0);
    CHECK(records[0].error.find("redirect loop") != std::string::npos);
    CHECK(records[1].status == 200);  // the other seed still ran
    CHECK(summary.per_status[0] == 1);
  }

  SUBCASE("redirect budget") {
    CrawlConfig cfg = config_with_seed(server.base() + "/loop1");
    cfg.max_redirects = 0;
    std::vector<CrawlRecord> records;
    crawl({desc}, cfg, [&](const CrawlRecord& r) { records.push_back(r); });
    REQUIRE(records.size() == 1);
    CHECK(records[0].status == 0);
    CHECK(records[0].error.find("redirect limit exceeded") !=
          std::string::npos);
  }

  SUBCASE("redirect target already fetched is not fetched again") {
    RellDescription both = parse_description(R"(<?xml version="1.0"?>
<service xmlns="urn:rell:v1" id="r2" name="R2">
  <resource id="entry" name="entry">
    <uri match="http://[^/]+/old"/>
    <representation id="entry-html" mediatype="text/html">
      <link id="entry-person" target="person">
        <selector xpath="//a/@href"/>
      </link>
    </representation>
  </resource>
  <resource id="person" name="person">
    <uri match="http://[^/]+/p/[a-z]+"/>
    <representation id="person-html" mediatype="text/html"/>
  </resource>
</service>
)");
    // /old redirects to /p/alice, whose page links to itself.  The final
    // URI is marked seen before link admission, so the self link must not
    // trigger a second fetch.
    CrawlConfig cfg = config_with_seed(server.base() + "/old");
    std::vector<CrawlRecord> records;
    crawl({both}, cfg, [&](const CrawlRecord& r) { records.push_back(r); });
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].links.size() == 1);
    CHECK(records[0].links[0].target.kind == LinkClass::in_scope);
    CHECK_FALSE(records[0].links[0].followed);
    auto log = server.log();
    CHECK(std::count(log.begin(), log.end(), "GET /p/alice") == 1);
  }
}

TEST_CASE("error statuses are recorded without links") {
  TestServer server;
  server.svr.Get("/gone", [&server](const httplib::Request& req,
                                    httplib::Response& res) {
    server.record(req);
    res.status = 404;
    res.set_content("not here", "text/plain");
  });
  server.start();

  RellDescription desc = parse_description(R"(<?xml version="1.0"?>
<service xmlns="urn:rell:v1" id="e" name="E">
  <resource id="thing" name="thing">
    <uri match="http://[^/]+/gone"/>
    <representation id="thing-html" mediatype="text/html"/>
  </resource>
</service>
)");

  std::vector<CrawlRecord> records;
  CrawlSummary summary =
      crawl({desc}, config_with_seed(server.base() + "/gone"),
            [&](const CrawlRecord& r) { records.push_back(r); });
  REQUIRE(records.size() == 1);
  CHECK(records[0].status == 404);
  CHECK(records[0].links.empty());
  CHECK(summary.per_status[404] == 1);
}

TEST_CASE("connection failures are recorded as status 0") {
  // A port with nothing listening: bind then close to find a free one.
  int dead_port;
  {
    httplib::Server probe;
    dead_port = probe.bind_to_any_port("127.0.0.1");
  }

  RellDescription desc = parse_description(R"(<?xml version="1.0"?>
<service xmlns="urn:rell:v1" id="d" name="D">
  <resource id="thing" name="thing">
    <uri match="http://[^/]+/x"/>
    <representation id="thing-html" mediatype="text/html"/>
  </resource>
</service>
)");
  CrawlConfig cfg =
      config_with_seed("http://127.0.0.1:" + std::to_string(dead_port) + "/x");
  cfg.timeout = std::chrono::milliseconds(500);
  std::vector<CrawlRecord> records;
  crawl({desc}, cfg, [&](const CrawlRecord& r) { records.push_back(r); });
  REQUIRE(records.size() == 1);
  CHECK(records[0].status == 0);
  CHECK_FALSE(records[0].error.empty());
}

TEST_CASE("per-host politeness separates request timestamps") {
  TestServer server;
  serve_html(server, "/idx", R"(<html><body>
    <a class="person" href="/p/a">A</a>
    <a class="person" href="/p/b">B</a>
    <a class="person" href="/p/c">C</a>
  </body></html>)");
  serve_html(server, "/p/a", "<html></html>");
  serve_html(server, "/p/b", "<html></html>");
  serve_html(server, "/p/c", "<html></html>");
  server.start();

  auto check_spacing = [&](std::size_t concurrency) {
    CrawlConfig cfg = config_with_seed(server.base() + "/idx");
    cfg.per_host_delay = std::chrono::milliseconds(25);
    cfg.concurrency = concurrency;
    Crawler crawler(mini_descs(), cfg);
    crawler.run([](const CrawlRecord&) {});

    auto trace = crawler.trace();
    REQUIRE(trace.size() == 4);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i].host == trace[0].host);
      auto gap = trace[i].at - trace[i - 1].at;
      CHECK(gap >= std::chrono::milliseconds(25));
    }
  };

  SUBCASE("sequential") { check_spacing(1); }
  SUBCASE("concurrent fetches still honor the shared gate") {
    check_spacing(3);
  }
}

TEST_CASE("accept header lists the declared media types") {
  TestServer server;
  std::string seen_accept;
  std::mutex mu;
  server.svr.Get("/idx", [&](const httplib::Request& req,
                             httplib::Response& res) {
    {
      std::lock_guard<std::mutex> lock(mu);
      seen_accept = req.get_header_value("Accept");
    }
    server.record(req);
    res.set_content("<html></html>", "text/html");
  });
  server.start();

  crawl(mini_descs(), config_with_seed(server.base() + "/idx"),
        [](const CrawlRecord&) {});
  std::lock_guard<std::mutex> lock(mu);
  CHECK(seen_accept == "text/html");
}

TEST_CASE("media type mismatch still attempts extraction") {
  TestServer server;
  server.svr.Get("/idx", [&server](const httplib::Request& req,
                                   httplib::Response& res) {
    server.record(req);
    // HTML content mislabeled as plain text.
    res.set_content(
        R"(<html><body><a class="person" href="/p/a">A</a></body></html>)",
        "text/plain");
  });
  serve_html(server, "/p/a", "<html></html>");
  server.start();

  std::vector<CrawlRecord> records;
  CrawlSummary summary =
      crawl(mini_descs(), config_with_seed(server.base() + "/idx"),
            [&](const CrawlRecord& r) { records.push_back(r); });

  REQUIRE(records.size() == 2);  // extraction found /p/a despite the label
  CHECK(records[0].media_type == "text/plain");
  CHECK(records[0].media_type_mismatch);
  CHECK(records[0].representation_id == "idx-html");
  CHECK(summary.media_type_mismatches == 1);
}

TEST_CASE("crawls are deterministic") {
  TestServer server;
  serve_html(server, "/idx", R"(<html><body>
    <a class="person" href="/p/a">A</a>
    <a class="person" href="/p/b">B</a>
    <a class="ext" href="/outside">x</a>
  </body></html>)");
  serve_html(server, "/p/a",
             R"(<html><body><a class="friend" href="/p/b">B</a></body></html>)");
  serve_html(server, "/p/b", "<html></html>");
  server.start();

  auto run_once = [&] {
    std::vector<std::string> shape;
    crawl(mini_descs(), config_with_seed(server.base() + "/idx"),
          [&](const CrawlRecord& r) {
            std::string row = r.request_uri + "|" + r.final_uri + "|" +
                              std::to_string(r.status) + "|" +
                              to_hex(r.body_digest);
            for (const auto& link : r.links) {
              row += "|" + link.link_id + ">" + link.absolute_uri + ":" +
                     std::to_string(static_cast<int>(link.target.kind));
            }
            shape.push_back(row);
          });
    return shape;
  };

  auto first = run_once();
  auto second = run_once();
  CHECK(first == second);
  CHECK_FALSE(first.empty());
}
