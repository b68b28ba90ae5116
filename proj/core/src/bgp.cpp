#include "rell/bgp.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>

#include "rell/vocab.hpp"

namespace rell {
namespace {

bool is_var_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_pname_prefix_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool is_pname_local_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw QueryError(what, at);
  }

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  // Reads a bare word ([A-Za-z]+) without consuming it.
  std::string peek_word() {
    skip_ws();
    std::size_t i = pos;
    while (i < text.size() &&
           std::isalpha(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    return std::string(text.substr(pos, i - pos));
  }

  bool take_keyword(std::string_view keyword) {
    std::string word = peek_word();
    if (word.size() != keyword.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(word[i])) != keyword[i]) {
        return false;
      }
    }
    pos += word.size();
    return true;
  }

  void expect(char c, const std::string& what) {
    if (peek() != c) fail(what, pos);
    ++pos;
  }
};

std::string read_variable_name(Cursor& c) {
  std::size_t at = c.pos;
  ++c.pos;  // consume '?'
  std::size_t start = c.pos;
  while (c.pos < c.text.size() && is_var_char(c.text[c.pos])) ++c.pos;
  if (c.pos == start) c.fail("empty variable name after '?'", at);
  return std::string(c.text.substr(start, c.pos - start));
}

std::string read_iri_ref(Cursor& c) {
  std::size_t at = c.pos;
  ++c.pos;  // consume '<'
  std::size_t start = c.pos;
  while (c.pos < c.text.size() && c.text[c.pos] != '>') {
    char ch = c.text[c.pos];
    if (ch == ' ' || ch == '\n' || ch == '<' || ch == '"') {
      c.fail("invalid character in IRI", c.pos);
    }
    ++c.pos;
  }
  if (c.pos >= c.text.size()) c.fail("unterminated IRI", at);
  std::string iri(c.text.substr(start, c.pos - start));
  ++c.pos;  // consume '>'
  if (!looks_absolute_iri(iri)) c.fail("relative IRI in query: " + iri, at);
  return iri;
}

// Reads `prefix:local` and expands it.  Local names may contain internal
// dots (media-type classes such as mt:text.html) but a trailing dot stays
// outside the name, where it terminates the pattern.
std::string read_pname(Cursor& c, const BgpQuery& query) {
  std::size_t at = c.pos;
  std::size_t start = c.pos;
  while (c.pos < c.text.size() && is_pname_prefix_char(c.text[c.pos])) ++c.pos;
  std::string prefix(c.text.substr(start, c.pos - start));
  if (c.pos >= c.text.size() || c.text[c.pos] != ':') {
    c.fail("expected ':' in prefixed name", at);
  }
  ++c.pos;
  std::string local;
  while (c.pos < c.text.size()) {
    char ch = c.text[c.pos];
    if (is_pname_local_char(ch)) {
      local += ch;
      ++c.pos;
    } else if (ch == '.' && c.pos + 1 < c.text.size() &&
               is_pname_local_char(c.text[c.pos + 1])) {
      local += ch;
      ++c.pos;
    } else {
      break;
    }
  }
  auto it = query.prefixes.find(prefix);
  if (it == query.prefixes.end()) {
    c.fail("undeclared prefix '" + prefix + "'", at);
  }
  return it->second + local;
}

Term read_literal(Cursor& c, const BgpQuery& query) {
  std::size_t at = c.pos;
  ++c.pos;  // consume '"'
  std::string lexical;
  for (;;) {
    if (c.pos >= c.text.size()) c.fail("unterminated literal", at);
    char ch = c.text[c.pos++];
    if (ch == '"') break;
    if (ch == '\n') c.fail("newline in literal", c.pos - 1);
    if (ch == '\\') {
      if (c.pos >= c.text.size()) c.fail("dangling escape in literal", at);
      char esc = c.text[c.pos++];
      switch (esc) {
        case 't': lexical += '\t'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case '"': lexical += '"'; break;
        case '\\': lexical += '\\'; break;
        default:
          c.fail(std::string("unsupported escape '\\") + esc + "' in literal",
                 c.pos - 2);
      }
    } else {
      lexical += ch;
    }
  }
  if (c.pos < c.text.size() && c.text[c.pos] == '@') {
    ++c.pos;
    std::size_t start = c.pos;
    while (c.pos < c.text.size() &&
           (std::isalnum(static_cast<unsigned char>(c.text[c.pos])) ||
            c.text[c.pos] == '-')) {
      ++c.pos;
    }
    if (c.pos == start) c.fail("empty language tag", start);
    return Term::literal(std::move(lexical), "",
                         std::string(c.text.substr(start, c.pos - start)));
  }
  if (c.pos + 1 < c.text.size() && c.text[c.pos] == '^' &&
      c.text[c.pos + 1] == '^') {
    c.pos += 2;
    std::string datatype;
    if (c.pos < c.text.size() && c.text[c.pos] == '<') {
      datatype = read_iri_ref(c);
    } else {
      datatype = read_pname(c, query);
    }
    return Term::literal(std::move(lexical), std::move(datatype));
  }
  return Term::literal(std::move(lexical));
}

PatternTerm read_pattern_term(Cursor& c, const BgpQuery& query,
                              bool predicate_position) {
  if (c.eof()) c.fail("expected a term", c.pos);
  std::size_t at = c.pos;
  char ch = c.text[c.pos];
  if (ch == '?') {
    PatternTerm slot;
    slot.variable = read_variable_name(c);
    return slot;
  }
  if (ch == '<') {
    return PatternTerm{std::nullopt, Term::iri(read_iri_ref(c))};
  }
  if (ch == '"') {
    if (predicate_position) c.fail("literal in predicate position", at);
    return PatternTerm{std::nullopt, read_literal(c, query)};
  }
  if (ch == '_' && c.pos + 1 < c.text.size() && c.text[c.pos + 1] == ':') {
    c.fail("blank node labels are not allowed in queries", at);
  }
  if (std::isalpha(static_cast<unsigned char>(ch)) || ch == ':') {
    // Bare `a` (not followed by a pname ':') means rdf:type.
    if (ch == 'a' &&
        (c.pos + 1 >= c.text.size() ||
         (!is_pname_prefix_char(c.text[c.pos + 1]) &&
          c.text[c.pos + 1] != ':'))) {
      ++c.pos;
      if (!predicate_position) {
        c.fail("'a' is only valid as a predicate", at);
      }
      return PatternTerm{std::nullopt, vocab::rdf_type()};
    }
    return PatternTerm{std::nullopt, Term::iri(read_pname(c, query))};
  }
  c.fail(std::string("expected variable, IRI, or literal, found '") + ch + "'",
         at);
}

}  // namespace

BgpQuery parse_bgp_query(std::string_view text) {
  Cursor c{text};
  BgpQuery query;

  while (c.take_keyword("PREFIX")) {
    c.skip_ws();
    std::size_t at = c.pos;
    std::size_t start = c.pos;
    while (c.pos < c.text.size() && is_pname_prefix_char(c.text[c.pos])) {
      ++c.pos;
    }
    std::string name(c.text.substr(start, c.pos - start));
    if (c.pos >= c.text.size() || c.text[c.pos] != ':') {
      c.fail("expected ':' after prefix name", at);
    }
    ++c.pos;
    if (c.peek() != '<') c.fail("expected '<iri>' in PREFIX declaration", c.pos);
    query.prefixes[name] = read_iri_ref(c);
  }

  if (!c.take_keyword("SELECT")) c.fail("expected SELECT", c.pos);
  if (c.take_keyword("DISTINCT")) query.distinct = true;

  std::vector<std::size_t> projected_at;
  while (c.peek() == '?') {
    std::size_t at = c.pos;
    std::string name = read_variable_name(c);
    if (std::find(query.projected.begin(), query.projected.end(), name) !=
        query.projected.end()) {
      c.fail("duplicate variable ?" + name + " in SELECT", at);
    }
    query.projected.push_back(std::move(name));
    projected_at.push_back(at);
  }
  if (query.projected.empty()) {
    c.fail("expected at least one ?variable after SELECT", c.pos);
  }

  if (!c.take_keyword("WHERE")) c.fail("expected WHERE", c.pos);
  c.expect('{', "expected '{'");

  while (c.peek() != '}') {
    TriplePattern pattern;
    pattern.subject = read_pattern_term(c, query, false);
    pattern.predicate = read_pattern_term(c, query, true);
    pattern.object = read_pattern_term(c, query, false);
    query.patterns.push_back(std::move(pattern));
    if (c.peek() == '.') {
      ++c.pos;
    } else if (c.peek() != '}') {
      c.fail("expected '.' or '}' after triple pattern", c.pos);
    }
  }
  c.expect('}', "expected '}'");
  if (!c.eof()) c.fail("unexpected content after '}'", c.pos);

  for (std::size_t i = 0; i < query.projected.size(); ++i) {
    bool bound = false;
    for (const auto& p : query.patterns) {
      for (const PatternTerm* slot :
           {&p.subject, &p.predicate, &p.object}) {
        if (slot->is_variable() && *slot->variable == query.projected[i]) {
          bound = true;
        }
      }
    }
    if (!bound) {
      c.fail("projected variable ?" + query.projected[i] +
                 " does not appear in WHERE",
             projected_at[i]);
    }
  }
  return query;
}

QueryResult bgp_query(const QuadStore& store, const BgpQuery& query,
                      const QueryOptions& options) {
  const QuadStore* source = &store;
  QuadStore augmented;
  if (options.infer_subproperties) {
    augmented = store;
    subproperty_closure(augmented);
    source = &augmented;
  }

  std::vector<std::array<Term, 3>> triples;
  for (const Quad& q : source->distinct_triples()) {
    triples.push_back({q.subject, q.predicate, q.object});
  }

  SameAsIndex equivalence;
  if (options.sameas_expansion) {
    equivalence = SameAsIndex::build(*source);
    for (auto& t : triples) {
      for (auto& slot : t) slot = equivalence.representative(slot);
    }
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  }

  // Assign every distinct variable a binding slot.
  std::map<std::string, std::size_t> var_index;
  for (const auto& p : query.patterns) {
    for (const PatternTerm* slot : {&p.subject, &p.predicate, &p.object}) {
      if (slot->is_variable()) {
        var_index.try_emplace(*slot->variable, var_index.size());
      }
    }
  }

  // Compile patterns to either a variable slot or a concrete (possibly
  // canonicalized) term.
  struct Slot {
    int var = -1;
    Term term;
  };
  std::vector<std::array<Slot, 3>> compiled;
  for (const auto& p : query.patterns) {
    std::array<Slot, 3> row;
    const PatternTerm* slots[3] = {&p.subject, &p.predicate, &p.object};
    for (int k = 0; k < 3; ++k) {
      if (slots[k]->is_variable()) {
        row[k].var = static_cast<int>(var_index.at(*slots[k]->variable));
      } else {
        row[k].term = options.sameas_expansion
                          ? equivalence.representative(slots[k]->term)
                          : slots[k]->term;
      }
    }
    compiled.push_back(std::move(row));
  }

  std::vector<std::size_t> projected_slots;
  for (const auto& name : query.projected) {
    projected_slots.push_back(var_index.at(name));
  }

  std::vector<std::optional<Term>> binding(var_index.size());
  std::vector<std::vector<Term>> rows;
  std::function<void(std::size_t)> step = [&](std::size_t pi) {
    if (pi == compiled.size()) {
      std::vector<Term> row;
      row.reserve(projected_slots.size());
      for (std::size_t s : projected_slots) row.push_back(*binding[s]);
      rows.push_back(std::move(row));
      return;
    }
    const auto& pattern = compiled[pi];
    for (const auto& triple : triples) {
      std::array<int, 3> bound_here = {-1, -1, -1};
      bool ok = true;
      for (int k = 0; k < 3 && ok; ++k) {
        const Term& value = triple[static_cast<std::size_t>(k)];
        const Slot& slot = pattern[static_cast<std::size_t>(k)];
        if (slot.var < 0) {
          ok = slot.term == value;
        } else if (binding[static_cast<std::size_t>(slot.var)]) {
          ok = *binding[static_cast<std::size_t>(slot.var)] == value;
        } else {
          binding[static_cast<std::size_t>(slot.var)] = value;
          bound_here[static_cast<std::size_t>(k)] = slot.var;
        }
      }
      if (ok) step(pi + 1);
      for (int k = 0; k < 3; ++k) {
        if (bound_here[static_cast<std::size_t>(k)] >= 0) {
          binding[static_cast<std::size_t>(
                      bound_here[static_cast<std::size_t>(k)])]
              .reset();
        }
      }
    }
  };
  step(0);

  std::sort(rows.begin(), rows.end());
  if (query.distinct || options.distinct) {
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  }

  return QueryResult{query.projected, std::move(rows)};
}

}  // namespace rell
