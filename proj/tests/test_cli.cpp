// CLI tests: the installed binaries driven as subprocesses, checking the
// documented exit-code contract (0 success, 1 domain error, 2 environment
// error) and the shapes of their outputs.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "httplib.h"
#include "rell/fixture.hpp"

using namespace rell;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Runs a shell command, capturing exit code and both streams.
RunResult run(const std::string& command) {
  static int counter = 0;
  fs::path base = fs::temp_directory_path() /
                  ("rell-cli-" + std::to_string(::getpid()) + "-" +
                   std::to_string(counter++));
  fs::path out = base.string() + ".out";
  fs::path err = base.string() + ".err";
  int rc = std::system(
      (command + " > " + out.string() + " 2> " + err.string()).c_str());
  RunResult result;
  result.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  fs::remove(out);
  fs::remove(err);
  return result;
}

std::string fixtures_path(const std::string& rel) {
  return (fs::path(RELL_FIXTURES_DIR) / rel).string();
}

fs::path scratch_file(const std::string& name, const std::string& content) {
  fs::path path = fs::temp_directory_path() /
                  ("rell-cli-" + std::to_string(::getpid()) + "-" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("validate accepts the shipped descriptions") {
  RunResult result = run(std::string(RELL_HARVEST_BIN) + " validate " +
                         fixtures_path("descriptions/school.xml") + " " +
                         fixtures_path("descriptions/feeds.xml") + " " +
                         fixtures_path("descriptions/photos.xml") + " " +
                         fixtures_path("descriptions/usermap.xml"));
  CHECK(result.code == 0);
  CHECK(result.out.find("school.xml: ok") != std::string::npos);
  CHECK(result.out.find("4 resource types") != std::string::npos);
}

TEST_CASE("validate rejects a collection link with a target") {
  fs::path bad = scratch_file("bad-desc.xml", R"(<service xmlns="urn:rell:v1" id="x" name="X">
  <resource id="list" name="List">
    <uri match="http://[^/]+/list"/>
    <representation id="list-html" mediatype="text/html">
      <link id="next" kind="collection" target="list">
        <selector xpath="//a/@href"/>
      </link>
    </representation>
  </resource>
</service>)");
  RunResult result = run(std::string(RELL_HARVEST_BIN) + " validate " +
                         bad.string());
  CHECK(result.code == 1);
  CHECK(result.err.find("collection") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("validate reports a missing file as an environment error") {
  RunResult result = run(std::string(RELL_HARVEST_BIN) +
                         " validate /nonexistent/desc.xml");
  CHECK(result.code == 2);
  CHECK(result.err.find("cannot read") != std::string::npos);
}

TEST_CASE("crawl refuses a seed that matches no description") {
  RunResult result = run(std::string(RELL_HARVEST_BIN) + " crawl --desc " +
                         fixtures_path("descriptions/school.xml") +
                         " --seed http://127.0.0.1:1/unmatched");
  CHECK(result.code == 1);
  CHECK(result.err.find("matches no described resource type") !=
        std::string::npos);
}

TEST_CASE("crawl survives an unreachable host with exit 0") {
  // Port 1 on loopback: valid seed shape, connection refused.
  RunResult result = run(std::string(RELL_HARVEST_BIN) + " crawl --desc " +
                         fixtures_path("descriptions/school.xml") +
                         " --seed http://127.0.0.1:1/people --out /dev/null");
  CHECK(result.code == 0);
  CHECK(result.err.find("status.0=1") != std::string::npos);
  CHECK(result.err.find("fetch failed") != std::string::npos);
}

TEST_CASE("crawl exports and reports against a live fixture service") {
  CorpusManifest manifest = load_manifest(RELL_FIXTURES_DIR);
  FixtureServer school(manifest, "school");
  int port = school.start();
  std::string base = "http://127.0.0.1:" + std::to_string(port);

  fs::path out = fs::temp_directory_path() / "rell-cli-school.nq";
  fs::path report = fs::temp_directory_path() / "rell-cli-school.report";
  std::string command = std::string(RELL_HARVEST_BIN) + " crawl --desc " +
                        fixtures_path("descriptions/school.xml") +
                        " --seed " + base + "/people --seed " + base +
                        "/courses --rules " +
                        fixtures_path("rules/transforms.xml") + " --out " +
                        out.string() + " --report " + report.string();

  SUBCASE("counts match the corpus manifest") {
    RunResult result = run(command);
    CHECK(result.code == 0);
    std::string text = slurp(report);
    CHECK(text.find("fetched=10\n") != std::string::npos);
    CHECK(text.find("quads.links=12\n") != std::string::npos);
    CHECK(text.find("quads.total=111\n") != std::string::npos);

    // The export is one N-Quads line per quad.
    std::string exported = slurp(out);
    std::size_t lines = 0;
    for (char c : exported) lines += (c == '\n');
    CHECK(lines == 111);
  }

  SUBCASE("two crawls export byte-identical datasets") {
    fs::path second = fs::temp_directory_path() / "rell-cli-school2.nq";
    CHECK(run(command).code == 0);
    CHECK(run(std::string(RELL_HARVEST_BIN) + " crawl --desc " +
              fixtures_path("descriptions/school.xml") + " --seed " + base +
              "/people --seed " + base + "/courses --rules " +
              fixtures_path("rules/transforms.xml") + " --out " +
              second.string() + " --report /dev/null")
              .code == 0);
    CHECK(slurp(out) == slurp(second));
    CHECK_FALSE(slurp(out).empty());
    fs::remove(second);
  }

  SUBCASE("a budget of one fetches exactly one resource") {
    RunResult result = run(command + " --max 1");
    CHECK(result.code == 0);
    CHECK(slurp(report).find("fetched=1\n") != std::string::npos);
  }

  SUBCASE("queries over the export answer with a header and rows") {
    CHECK(run(command).code == 0);
    fs::path query = scratch_file("fn.rq", R"(PREFIX school: <http://rell.example/service/school#>
PREFIX vcard: <http://www.w3.org/2006/vcard/ns#>
SELECT ?person ?name WHERE {
  ?person a school:person .
  ?person vcard:fn ?name .
})");
    RunResult result = run(std::string(RELL_HARVEST_BIN) + " query " +
                           out.string() + " " + query.string());
    CHECK(result.code == 0);
    CHECK(result.out.find("?person\t?name\n") == 0);
    CHECK(result.out.find("\t\"Erik Wilde\"\n") != std::string::npos);
    std::size_t rows = 0;
    for (char c : result.out) rows += (c == '\n');
    CHECK(rows == 4);  // header + three people
    fs::remove(query);
  }

  SUBCASE("an empty result is a header alone, exit 0") {
    CHECK(run(command).code == 0);
    fs::path query = scratch_file("none.rq",
                                  "SELECT ?x WHERE { ?x <http://nope.test/p> ?x }");
    RunResult result = run(std::string(RELL_HARVEST_BIN) + " query " +
                           out.string() + " " + query.string());
    CHECK(result.code == 0);
    CHECK(result.out == "?x\n");
    fs::remove(query);
  }

  fs::remove(out);
  fs::remove(report);
}

TEST_CASE("query rejects bad syntax with the offset") {
  fs::path store = scratch_file("empty.nq", "");
  fs::path query = scratch_file("bad.rq", "SELECT ?x FROM { }");
  RunResult result = run(std::string(RELL_HARVEST_BIN) + " query " +
                         store.string() + " " + query.string());
  CHECK(result.code == 1);
  CHECK(result.err.find("offset") != std::string::npos);
  fs::remove(store);
  fs::remove(query);
}

TEST_CASE("query reports a missing store as an environment error") {
  fs::path query = scratch_file("q.rq", "SELECT ?x WHERE { ?x a ?x }");
  RunResult result = run(std::string(RELL_HARVEST_BIN) +
                         " query /nonexistent/store.nq " + query.string());
  CHECK(result.code == 2);
  fs::remove(query);
}

TEST_CASE("fixture selfcheck exit codes") {
  SUBCASE("shipped corpus passes") {
    RunResult result = run(std::string(RELL_FIXTURE_BIN) +
                           " selfcheck --corpus " + RELL_FIXTURES_DIR);
    CHECK(result.code == 0);
    CHECK(result.out.find("selfcheck: ok") != std::string::npos);
    CHECK(result.out.find("composite.fetched=27") != std::string::npos);
  }
  SUBCASE("an empty directory fails") {
    fs::path empty = fs::temp_directory_path() /
                     ("rell-cli-empty-" + std::to_string(::getpid()));
    fs::create_directories(empty);
    RunResult result = run(std::string(RELL_FIXTURE_BIN) +
                           " selfcheck --corpus " + empty.string());
    CHECK(result.code == 1);
    CHECK(result.err.find("no manifest.json") != std::string::npos);
    fs::remove_all(empty);
  }
}

TEST_CASE("fixture serve answers requests until told to stop") {
  // fork/exec so the port can be read from the child's stdout and the
  // child can be stopped with a signal, like a script would.
  int pipe_fds[2];
  REQUIRE(::pipe(pipe_fds) == 0);
  pid_t child = ::fork();
  REQUIRE(child >= 0);
  if (child == 0) {
    ::dup2(pipe_fds[1], STDOUT_FILENO);
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    ::execl(RELL_FIXTURE_BIN, RELL_FIXTURE_BIN, "serve", "--corpus",
            RELL_FIXTURES_DIR, "--service", "school", (char*)nullptr);
    ::_exit(127);
  }
  ::close(pipe_fds[1]);

  // First line of output: PORT=<n>.
  std::string line;
  char ch;
  while (::read(pipe_fds[0], &ch, 1) == 1 && ch != '\n') line.push_back(ch);
  ::close(pipe_fds[0]);
  REQUIRE(line.rfind("PORT=", 0) == 0);
  int port = std::stoi(line.substr(5));
  CHECK(port > 0);

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/people/erik");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.find("Erik Wilde") != std::string::npos);

  ::kill(child, SIGTERM);
  int status = 0;
  REQUIRE(::waitpid(child, &status, 0) == child);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
}
