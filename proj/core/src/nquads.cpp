#include "rell/nquads.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <tuple>

#include "rell/diag.hpp"
#include "rell/vocab.hpp"

namespace rell {

namespace {

// ---------------------------------------------------------- serialization

// Encoding with blank labels hidden, used to sort quads before assigning
// canonical labels.
std::string masked_encode(const Term& term) {
  if (term.is_blank()) return "_:";
  return term.encode();
}

std::string masked_encode(const Quad& quad) {
  std::string out = masked_encode(quad.subject) + " " +
                    masked_encode(quad.predicate) + " " +
                    masked_encode(quad.object);
  if (quad.graph) out += " " + masked_encode(*quad.graph);
  return out + " .";
}

// Label order used only for tie-breaking among equally-masked quads:
// shorter first, then lexicographic ("b2" before "b10").
bool label_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::vector<std::string> blank_labels(const Quad& quad) {
  std::vector<std::string> out;
  if (quad.subject.is_blank()) out.push_back(quad.subject.value);
  if (quad.object.is_blank()) out.push_back(quad.object.value);
  return out;
}

}  // namespace

std::string serialize_nquads(const QuadStore& store) {
  std::vector<Quad> quads = store.quads();

  struct Keyed {
    std::string masked;
    std::vector<std::string> labels;
    const Quad* quad;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(quads.size());
  for (const Quad& quad : quads) {
    keyed.push_back({masked_encode(quad), blank_labels(quad), &quad});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.masked != b.masked) return a.masked < b.masked;
    if (a.labels.size() != b.labels.size()) {
      return a.labels.size() < b.labels.size();
    }
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
      if (a.labels[i] != b.labels[i]) {
        return label_less(a.labels[i], b.labels[i]);
      }
    }
    return false;
  });

  // First occurrence over the masked order fixes the canonical labels.
  std::map<std::string, std::string> rename;
  for (const Keyed& k : keyed) {
    for (const std::string& label : k.labels) {
      if (!rename.count(label)) {
        rename[label] = "b" + std::to_string(rename.size());
      }
    }
  }

  std::vector<std::string> lines;
  lines.reserve(keyed.size());
  for (const Keyed& k : keyed) {
    Quad quad = *k.quad;
    if (quad.subject.is_blank()) quad.subject.value = rename[quad.subject.value];
    if (quad.object.is_blank()) quad.object.value = rename[quad.object.value];
    lines.push_back(quad.encode());
  }
  std::sort(lines.begin(), lines.end());

  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------------- parsing

namespace {

struct LineCursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("N-Quads line " + std::to_string(line_no) + ": " +
                          what);
  }
  bool eof() const { return pos >= text.size(); }
  char peek() const { return eof() ? '\0' : text[pos]; }
  void skip_ws() {
    while (!eof() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
};

std::string utf8_encode_cp(std::uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::uint32_t read_hex(LineCursor& c, int digits) {
  std::uint32_t cp = 0;
  for (int i = 0; i < digits; ++i) {
    if (c.eof()) c.fail("truncated \\u escape");
    char d = c.text[c.pos++];
    int v;
    if (d >= '0' && d <= '9') v = d - '0';
    else if (d >= 'a' && d <= 'f') v = d - 'a' + 10;
    else if (d >= 'A' && d <= 'F') v = d - 'A' + 10;
    else c.fail("bad hex digit in \\u escape");
    cp = (cp << 4) | static_cast<std::uint32_t>(v);
  }
  return cp;
}

std::string read_escaped(LineCursor& c, char terminator, bool literal_mode) {
  std::string out;
  while (!c.eof() && c.peek() != terminator) {
    char ch = c.text[c.pos++];
    if (ch != '\\') {
      out += ch;
      continue;
    }
    if (c.eof()) c.fail("trailing backslash");
    char esc = c.text[c.pos++];
    switch (esc) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case '"': out += '"'; break;
      case '\'': out += '\''; break;
      case '\\': out += '\\'; break;
      case 'u': out += utf8_encode_cp(read_hex(c, 4)); break;
      case 'U': out += utf8_encode_cp(read_hex(c, 8)); break;
      default:
        if (literal_mode) c.fail(std::string("bad escape '\\") + esc + "'");
        out += '\\';
        out += esc;
    }
  }
  if (c.eof()) c.fail("unterminated term");
  ++c.pos;  // terminator
  return out;
}

Term read_term(LineCursor& c, bool as_predicate, bool as_graph) {
  c.skip_ws();
  if (c.eof()) c.fail("unexpected end of line");
  char ch = c.peek();
  if (ch == '<') {
    ++c.pos;
    return Term::iri(read_escaped(c, '>', /*literal_mode=*/false));
  }
  if (as_predicate) c.fail("predicate must be an IRI");
  if (ch == '_') {
    if (as_graph) c.fail("graph labels must be IRIs");
    ++c.pos;
    if (c.peek() != ':') c.fail("expected ':' after '_'");
    ++c.pos;
    std::size_t start = c.pos;
    while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                        c.peek() == '_' || c.peek() == '-' ||
                        c.peek() == '.')) {
      ++c.pos;
    }
    if (c.pos == start) c.fail("empty blank node label");
    return Term::blank(std::string(c.text.substr(start, c.pos - start)));
  }
  if (ch == '"') {
    if (as_graph) c.fail("graph labels must be IRIs");
    ++c.pos;
    std::string lexical = read_escaped(c, '"', /*literal_mode=*/true);
    if (c.peek() == '@') {
      ++c.pos;
      std::size_t start = c.pos;
      while (!c.eof() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                          c.peek() == '-')) {
        ++c.pos;
      }
      if (c.pos == start) c.fail("empty language tag");
      return Term::literal(std::move(lexical), "",
                           std::string(c.text.substr(start, c.pos - start)));
    }
    if (c.peek() == '^') {
      ++c.pos;
      if (c.peek() != '^') c.fail("expected '^^'");
      ++c.pos;
      if (c.peek() != '<') c.fail("expected IRI datatype after '^^'");
      ++c.pos;
      return Term::literal(std::move(lexical),
                           read_escaped(c, '>', /*literal_mode=*/false));
    }
    return Term::literal(std::move(lexical));
  }
  c.fail(std::string("unexpected character '") + ch + "'");
}

}  // namespace

std::size_t parse_nquads(std::string_view text, QuadStore& store) {
  std::size_t inserted = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    ++line_no;
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineCursor c{line, 0, line_no};
    c.skip_ws();
    if (c.eof() || c.peek() == '#') continue;

    Quad quad;
    quad.subject = read_term(c, false, false);
    quad.predicate = read_term(c, true, false);
    quad.object = read_term(c, false, false);
    c.skip_ws();
    if (!c.eof() && c.peek() != '.') {
      quad.graph = read_term(c, false, true);
      c.skip_ws();
    }
    if (c.eof() || c.peek() != '.') c.fail("expected '.'");
    ++c.pos;
    c.skip_ws();
    if (!c.eof() && c.peek() != '#') c.fail("trailing content after '.'");

    try {
      if (store.insert(std::move(quad))) ++inserted;
    } catch (const ValidationError& e) {
      c.fail(e.what());
    }
  }
  return inserted;
}

// ----------------------------------------------------------------- Turtle

namespace {

bool turtle_safe_local(std::string_view local) {
  if (local.empty()) return true;
  if (!std::isalpha(static_cast<unsigned char>(local[0])) && local[0] != '_') {
    return false;
  }
  if (local.back() == '.') return false;
  return std::all_of(local.begin(), local.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

struct PrefixTable {
  const std::vector<std::pair<std::string, std::string>>* entries;
  mutable std::vector<bool> used;

  std::optional<std::string> compress(const std::string& iri) const {
    for (std::size_t i = 0; i < entries->size(); ++i) {
      const auto& [prefix, ns] = (*entries)[i];
      if (iri.size() >= ns.size() && iri.compare(0, ns.size(), ns) == 0) {
        std::string local = iri.substr(ns.size());
        if (turtle_safe_local(local)) {
          used[i] = true;
          return prefix + ":" + local;
        }
      }
    }
    return std::nullopt;
  }
};

std::string turtle_term(const Term& term, const PrefixTable& table) {
  switch (term.kind) {
    case Term::Kind::iri: {
      if (term.value == std::string(vocab::kRdf) + "type") return "a";
      if (auto compressed = table.compress(term.value)) return *compressed;
      return "<" + term.value + ">";
    }
    case Term::Kind::blank:
      return "_:" + term.value;
    case Term::Kind::literal: {
      std::string out = Term::literal(term.value).encode();
      if (!term.language.empty()) {
        out += "@" + term.language;
      } else if (!term.datatype.empty()) {
        Term dt = Term::iri(term.datatype);
        out += "^^" + turtle_term(dt, table);
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::string serialize_turtle(
    const QuadStore& store,
    const std::vector<std::pair<std::string, std::string>>& prefixes,
    QuadPattern::GraphSel graph_sel, const std::optional<Term>& graph) {
  QuadPattern pattern;
  pattern.graph_sel = graph_sel;
  pattern.graph = graph;
  std::vector<Quad> quads = store.match(pattern);

  // Distinct triples of the slice, grouped by subject, rdf:type first.
  std::set<Quad> triples;
  for (Quad quad : quads) {
    quad.graph.reset();
    triples.insert(std::move(quad));
  }

  const Term type_term = vocab::rdf_type();
  std::map<Term, std::map<Term, std::vector<Term>>> by_subject;
  for (const Quad& t : triples) {
    by_subject[t.subject][t.predicate].push_back(t.object);
  }

  PrefixTable table{&prefixes, std::vector<bool>(prefixes.size(), false)};
  std::string body;
  for (const auto& [subject, preds] : by_subject) {
    if (!body.empty()) body += "\n";
    body += turtle_term(subject, table);

    // rdf:type first, other predicates in canonical order.
    std::vector<const std::pair<const Term, std::vector<Term>>*> ordered;
    for (const auto& entry : preds) ordered.push_back(&entry);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [&](const auto* a, const auto* b) {
                       bool ta = a->first == type_term;
                       bool tb = b->first == type_term;
                       if (ta != tb) return ta;
                       return a->first < b->first;
                     });

    bool first_pred = true;
    for (const auto* entry : ordered) {
      body += first_pred ? " " : " ;\n  ";
      first_pred = false;
      body += turtle_term(entry->first, table);
      bool first_obj = true;
      for (const Term& object : entry->second) {
        body += first_obj ? " " : " , ";
        first_obj = false;
        body += turtle_term(object, table);
      }
    }
    body += " .\n";
  }

  std::string head;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    if (table.used[i]) {
      head += "@prefix " + prefixes[i].first + ": <" + prefixes[i].second +
              "> .\n";
    }
  }
  if (!head.empty() && !body.empty()) head += "\n";
  return head + body;
}

std::vector<std::pair<std::string, std::string>> standard_prefixes() {
  return {
      {"rdf", std::string(vocab::kRdf)},
      {"rdfs", std::string(vocab::kRdfs)},
      {"owl", std::string(vocab::kOwl)},
      {"xsd", std::string(vocab::kXsd)},
      {"rell", std::string(vocab::kRell)},
      {"mt", std::string(vocab::kMediaType)},
  };
}

}  // namespace rell
