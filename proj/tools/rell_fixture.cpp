// Command-line front end for the fixture corpus.
//
//   rell-fixture serve --corpus DIR --service NAME [--port N] [--log FILE]
//                      [--sub key=URL]...
//   rell-fixture selfcheck --corpus DIR
//
// serve runs one service's slice of the corpus on 127.0.0.1 until
// interrupted, printing the bound port as "PORT=<n>" so scripts can grab
// it.  selfcheck recomputes every expected count in the corpus manifest
// and exits 1 listing any disagreement.  Exit codes: 0 success, 1 domain
// error (bad corpus, mismatch), 2 environment error (port busy).

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "rell/diag.hpp"
#include "rell/fixture.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kEnvironmentError = 2;

std::atomic<bool> interrupted{false};

void handle_signal(int) { interrupted = true; }

struct ServeArgs {
  std::string corpus;
  std::string service;
  int port = 0;
  std::string log;
  std::vector<std::string> substitutions;  // key=URL
};

int cmd_serve(const ServeArgs& args) {
  rell::CorpusManifest manifest;
  try {
    manifest = rell::load_manifest(args.corpus);
  } catch (const rell::Error& e) {
    std::cerr << e.what() << "\n";
    return kDomainError;
  }

  try {
    rell::FixtureServer server(manifest, args.service);
    for (const std::string& pair : args.substitutions) {
      auto eq = pair.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "--sub needs key=URL, got \"" << pair << "\"\n";
        return kDomainError;
      }
      server.set_substitution(pair.substr(0, eq), pair.substr(eq + 1));
    }
    if (!args.log.empty()) server.set_log_file(args.log);

    int port;
    try {
      port = server.start(args.port);
    } catch (const rell::ConfigError& e) {
      std::cerr << e.what() << "\n";
      return kEnvironmentError;
    }
    std::cout << "PORT=" << port << "\n" << std::flush;

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!interrupted) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    server.stop();
    return kOk;
  } catch (const rell::Error& e) {
    // A service with no routes in the manifest, unreadable body files.
    std::cerr << e.what() << "\n";
    return kDomainError;
  }
}

int cmd_selfcheck(const std::string& corpus) {
  const rell::SelfCheckReport report = rell::selfcheck_corpus(corpus);
  for (const auto& [key, value] : report.recomputed) {
    std::cout << key << "=" << value << "\n";
  }
  for (const std::string& problem : report.problems) {
    std::cerr << problem << "\n";
  }
  if (report.ok) {
    std::cout << "selfcheck: ok\n";
    return kOk;
  }
  std::cerr << "selfcheck: " << report.problems.size() << " problem(s)\n";
  return kDomainError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serves and checks the fixture corpus"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  CLI::App* serve = app.add_subcommand(
      "serve", "Serve one service's corpus slice over local HTTP");
  serve->add_option("--corpus", serve_args.corpus, "Corpus directory")
      ->required();
  serve->add_option("--service", serve_args.service, "Service to serve")
      ->required();
  serve->add_option("--port", serve_args.port,
                    "Port to bind (default: pick a free one)");
  serve->add_option("--log", serve_args.log, "Append request log here");
  serve->add_option("--sub", serve_args.substitutions,
                    "Base URL substitution, key=URL (repeatable)");

  std::string selfcheck_corpus_dir;
  CLI::App* selfcheck = app.add_subcommand(
      "selfcheck", "Recompute the manifest's expected counts from the "
                   "corpus files");
  selfcheck->add_option("--corpus", selfcheck_corpus_dir, "Corpus directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kDomainError;
  }

  if (serve->parsed()) return cmd_serve(serve_args);
  return cmd_selfcheck(selfcheck_corpus_dir);
}
