// The Turtle files under ontology/ are the published form of the fixed
// ontologies the mapper emits. They must stay byte-identical to what the
// code produces, or the published files and the datasets drift apart.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rell/mapping.hpp"
#include "rell/nquads.hpp"
#include "rell/quadstore.hpp"

using namespace rell;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

TEST_CASE("published upper ontology matches the emitter byte for byte") {
  QuadStore store;
  emit_upper_ontology(store);
  CHECK(serialize_turtle(store, standard_prefixes()) ==
        read_file(std::filesystem::path(RELL_ONTOLOGY_DIR) / "upper.ttl"));
}

TEST_CASE("published media-type taxonomy matches the emitter byte for byte") {
  QuadStore store;
  emit_media_type_taxonomy(store);
  CHECK(serialize_turtle(store, standard_prefixes()) ==
        read_file(std::filesystem::path(RELL_ONTOLOGY_DIR) /
                  "media-types.ttl"));
}
