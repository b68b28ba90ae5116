// Fixture corpus tests: manifest loading, the HTTP server, and the
// selfcheck oracle.  The selfcheck recomputes every expected count in the
// shipped manifest from the corpus files; the green case here is what
// makes those numbers trustworthy, and the mutation cases prove the check
// can actually fail.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "httplib.h"
#include "rell/diag.hpp"
#include "rell/fixture.hpp"

using namespace rell;
namespace fs = std::filesystem;

namespace {

const char* corpus_dir() { return RELL_FIXTURES_DIR; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// A scratch copy of the corpus that mutation tests can deface.
class ScratchCorpus {
 public:
  ScratchCorpus() {
    dir_ = fs::temp_directory_path() /
           ("rell-corpus-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter_++));
    fs::copy(corpus_dir(), dir_, fs::copy_options::recursive);
  }
  ~ScratchCorpus() { fs::remove_all(dir_); }

  const fs::path& dir() const { return dir_; }

  // Replaces `from` with `to` in one corpus file; the text must be there.
  void rewrite(const std::string& rel, const std::string& from,
               const std::string& to) {
    std::string text = slurp(dir_ / rel);
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    spit(dir_ / rel, text);
  }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

bool any_problem_mentions(const SelfCheckReport& report,
                          const std::string& needle) {
  for (const std::string& problem : report.problems) {
    if (problem.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("manifest loads the shipped corpus") {
  CorpusManifest manifest = load_manifest(corpus_dir());
  CHECK(manifest.descriptions.size() == 4);
  CHECK(manifest.resources.size() == 27);
  CHECK(manifest.redirects.size() == 1);
  CHECK(manifest.scenarios.size() == 3);
  CHECK(manifest.scenarios.count("composite") == 1);
  CHECK(manifest.queries.count("cameras") == 1);
  CHECK(manifest.transforms_file == "rules/transforms.xml");

  const Scenario& composite = manifest.scenarios.at("composite");
  CHECK(composite.services.size() == 4);
  CHECK(composite.seeds.size() == 6);
  CHECK(composite.expected.at("fetched") == 27);
  CHECK(composite.expected_cameras ==
        std::vector<std::string>{"Canon PowerShot A430", "Nikon D40"});
}

TEST_CASE("manifest loading rejects broken corpora") {
  SUBCASE("missing directory") {
    CHECK_THROWS_WITH_AS(load_manifest("/nonexistent/corpus"),
                         doctest::Contains("no manifest.json"),
                         ValidationError);
  }
  SUBCASE("malformed JSON") {
    ScratchCorpus scratch;
    spit(scratch.dir() / "manifest.json", "{ not json");
    CHECK_THROWS_WITH_AS(load_manifest(scratch.dir().string()),
                         doctest::Contains("manifest.json"), ValidationError);
  }
  SUBCASE("resource on undeclared service") {
    ScratchCorpus scratch;
    scratch.rewrite("manifest.json", "{\"service\": \"school\", \"path\": \"/people\"",
                    "{\"service\": \"bank\", \"path\": \"/people\"");
    CHECK_THROWS_WITH_AS(load_manifest(scratch.dir().string()),
                         doctest::Contains("unknown service"),
                         ValidationError);
  }
  SUBCASE("duplicate route") {
    ScratchCorpus scratch;
    scratch.rewrite("manifest.json", "\"path\": \"/people/erik\"",
                    "\"path\": \"/people\"");
    CHECK_THROWS_WITH_AS(load_manifest(scratch.dir().string()),
                         doctest::Contains("duplicate route"),
                         ValidationError);
  }
  SUBCASE("missing body file") {
    ScratchCorpus scratch;
    fs::remove(scratch.dir() / "corpus/school/erik.html");
    CHECK_THROWS_WITH_AS(load_manifest(scratch.dir().string()),
                         doctest::Contains("does not exist"),
                         ValidationError);
  }
}

TEST_CASE("fixture server serves its service's slice") {
  CorpusManifest manifest = load_manifest(corpus_dir());
  FixtureServer school(manifest, "school");
  int port = school.start();
  CHECK(port > 0);
  CHECK(school.base_url() == "http://127.0.0.1:" + std::to_string(port));

  httplib::Client client("127.0.0.1", port);

  SUBCASE("declared routes answer with body and media type") {
    auto res = client.Get("/people/erik");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "text/html");
    CHECK(res->body.find("Erik Wilde") != std::string::npos);

    // Routing is on the full request target, query string included.
    auto page2 = client.Get("/courses?page=2");
    REQUIRE(page2);
    CHECK(page2->status == 200);
    CHECK(page2->body.find("db301") != std::string::npos);
  }

  SUBCASE("unknown paths and other services' paths are 404") {
    auto res = client.Get("/feeds");
    REQUIRE(res);
    CHECK(res->status == 404);
  }

  SUBCASE("redirect routes answer with status and location") {
    auto res = client.Get("/people/erikold");
    REQUIRE(res);
    CHECK(res->status == 301);
    CHECK(res->get_header_value("Location") == "/people/erik");
  }

  SUBCASE("the request log records every request in order") {
    school.clear_request_log();
    client.Get("/people");
    client.Get("/nothing");
    auto log = school.request_log();
    REQUIRE(log.size() == 2);
    CHECK(log[0].method == "GET");
    CHECK(log[0].target == "/people");
    CHECK(log[1].target == "/nothing");
    school.clear_request_log();
    CHECK(school.request_log().empty());
  }

  SUBCASE("starting twice is refused") {
    CHECK_THROWS_AS(school.start(), ConfigError);
  }
}

TEST_CASE("fixture server substitutes service bases at request time") {
  CorpusManifest manifest = load_manifest(corpus_dir());
  FixtureServer usermap(manifest, "usermap");
  usermap.start();
  usermap.set_substitution("school", "http://school.test:81");
  usermap.set_substitution("feeds", "http://feeds.test:82");
  usermap.set_substitution("photos", "http://photos.test:83");

  httplib::Client client("127.0.0.1", usermap.port());
  auto res = client.Get("/usermap.xml");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.find("http://school.test:81/people/erik") !=
        std::string::npos);
  CHECK(res->body.find("http://photos.test:83/photos/u/mary88") !=
        std::string::npos);
  CHECK(res->body.find("@@") == std::string::npos);
}

TEST_CASE("fixture server refuses a service with no routes") {
  CorpusManifest manifest = load_manifest(corpus_dir());
  CHECK_THROWS_WITH_AS(FixtureServer(manifest, "bank"),
                       doctest::Contains("no routes"), ConfigError);
}

TEST_CASE("selfcheck agrees with the shipped manifest") {
  SelfCheckReport report = selfcheck_corpus(corpus_dir());
  for (const std::string& problem : report.problems) {
    MESSAGE(problem);
  }
  CHECK(report.ok);
  CHECK(report.problems.empty());
  // Spot checks that the recomputation actually ran.
  CHECK(report.recomputed.at("composite.fetched") == "27");
  CHECK(report.recomputed.at("composite.cameras") ==
        "Canon PowerShot A430|Nikon D40");
  CHECK(report.recomputed.at("school.total_quads") == "111");
}

TEST_CASE("selfcheck catches a drifted manifest count") {
  ScratchCorpus scratch;
  scratch.rewrite("manifest.json", "\"link_quads\": 12", "\"link_quads\": 13");
  SelfCheckReport report = selfcheck_corpus(scratch.dir().string());
  CHECK_FALSE(report.ok);
  CHECK(any_problem_mentions(report, "link_quads"));
  CHECK(any_problem_mentions(report, "manifest says 13"));
  CHECK(any_problem_mentions(report, "corpus yields 12"));
}

TEST_CASE("selfcheck catches corpus content drift") {
  // Removing a course link from a person page shifts the link counts in
  // every scenario that crawls the school service.
  ScratchCorpus scratch;
  scratch.rewrite("corpus/school/mary.html",
                  "<li><a href=\"/courses/db301\">Database Design</a></li>",
                  "");
  SelfCheckReport report = selfcheck_corpus(scratch.dir().string());
  CHECK_FALSE(report.ok);
  CHECK(any_problem_mentions(report, "link_quads"));
}

TEST_CASE("selfcheck catches a route that contradicts the description") {
  ScratchCorpus scratch;
  scratch.rewrite("manifest.json",
                  "\"path\": \"/photos/p/201\", \"file\": \"corpus/photos/201.html\", \"media_type\": \"text/html\", \"type\": \"photo\"",
                  "\"path\": \"/photos/x/201\", \"file\": \"corpus/photos/201.html\", \"media_type\": \"text/html\", \"type\": \"photo\"");
  SelfCheckReport report = selfcheck_corpus(scratch.dir().string());
  CHECK_FALSE(report.ok);
  CHECK(any_problem_mentions(report, "matches no described resource type"));
}

TEST_CASE("selfcheck catches expected-camera drift") {
  ScratchCorpus scratch;
  scratch.rewrite("manifest.json", "\"Nikon D40\"", "\"Nikon D90\"");
  SelfCheckReport report = selfcheck_corpus(scratch.dir().string());
  CHECK_FALSE(report.ok);
  CHECK(any_problem_mentions(report, "cameras"));
}

TEST_CASE("selfcheck reports a missing corpus instead of throwing") {
  SelfCheckReport report = selfcheck_corpus("/nonexistent/corpus");
  CHECK_FALSE(report.ok);
  REQUIRE(report.problems.size() == 1);
  CHECK(report.problems[0].find("no manifest.json") != std::string::npos);
}
