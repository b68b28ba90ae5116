#include "doctest.h"

#include <string>
#include <vector>

#include "rell/bgp.hpp"
#include "rell/composition.hpp"
#include "rell/doc.hpp"
#include "rell/mapping.hpp"
#include "rell/quadstore.hpp"
#include "rell/term.hpp"
#include "rell/vocab.hpp"

using namespace rell;

namespace {

Term I(const std::string& iri) { return Term::iri(iri); }

IdentityMapSpec usermap_spec() {
  IdentityMapSpec spec;
  spec.group_source = "//user";
  spec.group = parse_selector(spec.group_source);
  spec.member_source = "uri/text()";
  spec.member = parse_selector(spec.member_source);
  return spec;
}

const char* kUserMapXml = R"(<usermap>
  <user>
    <uri>http://school.example/people/erik</uri>
    <uri>http://twitter-api.example/users/dret</uri>
    <uri>http://twitter.example/dret</uri>
    <uri>http://flickr.example/photos/dret</uri>
  </user>
  <user>
    <uri>http://school.example/people/mary</uri>
    <uri>http://flickr.example/photos/mary88</uri>
  </user>
</usermap>)";

const Term kGraph = Term::iri("http://rell.example/service/usermap#rtest");

}  // namespace

TEST_CASE("identity chains span each group") {
  QuadStore store;
  const DocTree doc = parse_xml(kUserMapXml);
  const IdentityOutcome out =
      ingest_identity_map(store, doc, usermap_spec(), kGraph);

  CHECK(out.quads == 4);  // 3 for the four-member group, 1 for the pair
  CHECK(out.groups == 2);
  CHECK(out.warnings.empty());
  CHECK(store.size() == 4);

  const Term same = vocab::owl_same_as();
  CHECK(store.contains(Quad{I("http://school.example/people/erik"), same,
                            I("http://twitter-api.example/users/dret"),
                            kGraph}));
  CHECK(store.contains(Quad{I("http://twitter-api.example/users/dret"), same,
                            I("http://twitter.example/dret"), kGraph}));
  CHECK(store.contains(Quad{I("http://twitter.example/dret"), same,
                            I("http://flickr.example/photos/dret"), kGraph}));
  CHECK(store.contains(Quad{I("http://school.example/people/mary"), same,
                            I("http://flickr.example/photos/mary88"),
                            kGraph}));

  SUBCASE("the closure recovers the full clique") {
    const SameAsIndex index = SameAsIndex::build(store);
    const Term erik = I("http://school.example/people/erik");
    const Term flickr = I("http://flickr.example/photos/dret");
    CHECK(index.representative(erik) == index.representative(flickr));
    // The two groups stay separate.
    const Term mary = I("http://school.example/people/mary");
    CHECK(index.representative(erik) != index.representative(mary));
  }
  SUBCASE("re-ingestion adds nothing") {
    const IdentityOutcome again =
        ingest_identity_map(store, doc, usermap_spec(), kGraph);
    CHECK(again.quads == 0);
    CHECK(store.size() == 4);
  }
}

TEST_CASE("identity ingestion edge cases") {
  QuadStore store;

  SUBCASE("empty document yields nothing") {
    const DocTree doc = parse_xml("<usermap/>");
    const IdentityOutcome out =
        ingest_identity_map(store, doc, usermap_spec(), kGraph);
    CHECK(out.quads == 0);
    CHECK(out.warnings.empty());
  }
  SUBCASE("a singleton group is skipped with a warning") {
    const DocTree doc = parse_xml(
        "<usermap><user><uri>http://a/only</uri></user></usermap>");
    const IdentityOutcome out =
        ingest_identity_map(store, doc, usermap_spec(), kGraph);
    CHECK(out.quads == 0);
    REQUIRE(out.warnings.size() == 1);
    CHECK(out.warnings[0].find("fewer than two") != std::string::npos);
  }
  SUBCASE("relative members are dropped, shrinking the group") {
    const DocTree doc = parse_xml(
        "<usermap><user><uri>/relative/path</uri>"
        "<uri>http://a/real</uri></user></usermap>");
    const IdentityOutcome out =
        ingest_identity_map(store, doc, usermap_spec(), kGraph);
    CHECK(out.quads == 0);
    REQUIRE(out.warnings.size() == 2);
    CHECK(out.warnings[0].find("not an absolute IRI") != std::string::npos);
    CHECK(out.warnings[1].find("fewer than two") != std::string::npos);
  }
  SUBCASE("surrounding whitespace in members is ignored") {
    const DocTree doc = parse_xml(
        "<usermap><user><uri>\n    http://a/x\n  </uri>"
        "<uri>  http://a/y </uri></user></usermap>");
    const IdentityOutcome out =
        ingest_identity_map(store, doc, usermap_spec(), kGraph);
    CHECK(out.quads == 1);
    CHECK(store.contains(Quad{I("http://a/x"), vocab::owl_same_as(),
                              I("http://a/y"), kGraph}));
  }
  SUBCASE("duplicate members collapse before chaining") {
    const DocTree doc = parse_xml(
        "<usermap><user><uri>http://a/x</uri><uri>http://a/x</uri>"
        "<uri>http://a/y</uri></user></usermap>");
    const IdentityOutcome out =
        ingest_identity_map(store, doc, usermap_spec(), kGraph);
    CHECK(out.quads == 1);
  }
  SUBCASE("a document repeating a group adds no extra quads") {
    const DocTree doc = parse_xml(
        "<usermap>"
        "<user><uri>http://a/x</uri><uri>http://a/y</uri></user>"
        "<user><uri>http://a/x</uri><uri>http://a/y</uri></user>"
        "</usermap>");
    const IdentityOutcome out =
        ingest_identity_map(store, doc, usermap_spec(), kGraph);
    CHECK(out.quads == 1);
    CHECK(out.groups == 2);
  }
}

namespace {

// A two-service composite: a school person and a photo service, glued by
// one sameAs chain.  Insertion order is parameterized to check that
// composition results do not depend on harvest order.
QuadStore build_composite(bool school_first) {
  const Term erik = I("http://school.example/people/erik");
  const Term flickr_erik = I("http://flickr.example/photos/dret");
  std::vector<Quad> school = {
      Quad{erik, vocab::rdf_type(),
           vocab::service_term("school", "person"), std::nullopt},
  };
  std::vector<Quad> photos;
  for (int i = 1; i <= 3; ++i) {
    const Term photo =
        I("http://flickr.example/photo/" + std::to_string(i));
    photos.push_back(
        Quad{photo, I("http://ex.org/owner"), flickr_erik, std::nullopt});
    photos.push_back(Quad{photo, I("http://ex.org/camera"),
                          Term::literal(i < 3 ? "Canon PowerShot"
                                              : "Nikon D40"),
                          std::nullopt});
  }
  QuadStore store;
  const auto insert_all = [&](const std::vector<Quad>& quads) {
    for (const Quad& q : quads) store.insert(q);
  };
  if (school_first) {
    insert_all(school);
    insert_all(photos);
  } else {
    insert_all(photos);
    insert_all(school);
  }
  store.insert(Quad{erik, vocab::owl_same_as(), flickr_erik, kGraph});
  return store;
}

const char* kCameraQuery = R"(
  PREFIX school: <http://rell.example/service/school#>
  PREFIX ex: <http://ex.org/>
  SELECT DISTINCT ?camera WHERE {
    ?person a school:person .
    ?photo ex:owner ?person .
    ?photo ex:camera ?camera .
  }
)";

}  // namespace

TEST_CASE("composed queries cross service boundaries") {
  const QuadStore store = build_composite(true);
  const BgpQuery query = parse_bgp_query(kCameraQuery);

  SUBCASE("three photos, two distinct cameras, two rows") {
    const QueryResult result = compose_and_query(store, query);
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0][0] == Term::literal("Canon PowerShot"));
    CHECK(result.rows[1][0] == Term::literal("Nikon D40"));
  }
  SUBCASE("without expansion the identities stay apart") {
    const QueryResult result = bgp_query(store, query);
    CHECK(result.rows.empty());
  }
  SUBCASE("results are invariant under harvest order") {
    const QueryResult a = compose_and_query(build_composite(true), query);
    const QueryResult b = compose_and_query(build_composite(false), query);
    CHECK(a.rows == b.rows);
  }
  SUBCASE("a person with no photos yields no rows") {
    QuadStore lonely;
    lonely.insert(Quad{I("http://school.example/people/mary"),
                       vocab::rdf_type(),
                       vocab::service_term("school", "person"),
                       std::nullopt});
    const QueryResult result = compose_and_query(lonely, query);
    CHECK(result.rows.empty());
  }
}
