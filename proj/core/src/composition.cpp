#include "rell/composition.hpp"

#include <algorithm>
#include <utility>

#include "rell/diag.hpp"
#include "rell/selector.hpp"
#include "rell/uri.hpp"
#include "rell/vocab.hpp"

namespace rell {

IdentityOutcome ingest_identity_map(QuadStore& store, const DocTree& doc,
                                    const IdentityMapSpec& spec,
                                    const Term& graph) {
  IdentityOutcome out;
  const std::vector<int> groups = select_nodes(spec.group, doc, 0);
  std::size_t index = 0;
  for (int node : groups) {
    ++index;
    std::vector<std::string> members;
    for (const std::string& value : evaluate_from(spec.member, doc, node)) {
      std::string trimmed = value;
      const auto first = trimmed.find_first_not_of(" \t\r\n");
      if (first == std::string::npos) continue;
      trimmed = trimmed.substr(first, trimmed.find_last_not_of(" \t\r\n") -
                                          first + 1);
      try {
        std::string normalized = normalize_uri(trimmed);
        if (std::find(members.begin(), members.end(), normalized) ==
            members.end()) {
          members.push_back(std::move(normalized));
        }
      } catch (const UriError&) {
        out.warnings.push_back("identity group " + std::to_string(index) +
                               ": member '" + trimmed +
                               "' is not an absolute IRI, dropped");
      }
    }
    if (members.size() < 2) {
      out.warnings.push_back("identity group " + std::to_string(index) +
                             " has fewer than two members, skipped");
      continue;
    }
    ++out.groups;
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      Quad quad{Term::iri(members[i]), vocab::owl_same_as(),
                Term::iri(members[i + 1]), graph};
      if (store.insert(std::move(quad))) ++out.quads;
    }
  }
  return out;
}

QueryResult compose_and_query(const QuadStore& store, const BgpQuery& query,
                              QueryOptions options) {
  options.sameas_expansion = true;
  return bgp_query(store, query, options);
}

}  // namespace rell
