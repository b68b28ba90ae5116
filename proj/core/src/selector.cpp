#include "rell/selector.hpp"

#include <algorithm>
#include <cctype>

#include "rell/diag.hpp"

namespace rell {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Selector run() {
    Selector sel;
    sel.text = std::string(text_);
    if (text_.empty()) fail("empty selector", 0);

    Step::Axis axis = Step::Axis::child;
    if (take("//")) {
      sel.absolute = true;
      axis = Step::Axis::descendant;
    } else if (take("/")) {
      sel.absolute = true;
    }

    for (;;) {
      sel.steps.push_back(parse_step(axis));
      if (pos_ >= text_.size()) break;
      const Step& last = sel.steps.back();
      if (last.test == Step::Test::attribute ||
          last.test == Step::Test::text) {
        fail(std::string(last.test == Step::Test::attribute
                             ? "attribute step"
                             : "text() step") +
                 " must be the final step",
             pos_);
      }
      if (take("//")) {
        axis = Step::Axis::descendant;
      } else if (take("/")) {
        axis = Step::Axis::child;
      } else if (text_[pos_] == '|') {
        unsupported("union '|'", pos_);
      } else {
        fail("unexpected character '" + std::string(1, text_[pos_]) + "'",
             pos_);
      }
    }
    return sel;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t offset) {
    throw SelectorError(msg, offset, /*unsupported=*/false);
  }
  [[noreturn]] void unsupported(const std::string& what, std::size_t offset) {
    throw SelectorError("unsupported construct: " + what, offset,
                        /*unsupported=*/true);
  }

  bool take(std::string_view prefix) {
    if (text_.substr(pos_, prefix.size()) != prefix) return false;
    pos_ += prefix.size();
    return true;
  }

  std::string read_name() {
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) {
      fail("expected a name", pos_);
    }
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Step parse_step(Step::Axis axis) {
    Step step;
    step.axis = axis;
    std::size_t start = pos_;

    if (pos_ >= text_.size()) fail("expected a step", pos_);

    if (text_[pos_] == '.') {
      bool parent = pos_ + 1 < text_.size() && text_[pos_ + 1] == '.';
      unsupported(parent ? "'..' step" : "'.' step", pos_);
    }
    if (text_[pos_] == '@') {
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '*') {
        unsupported("attribute wildcard '@*'", start);
      }
      step.test = Step::Test::attribute;
      step.name = local_of(read_name(), start);
      parse_predicates(step, /*value_step=*/true);
      return step;
    }
    if (text_[pos_] == '*') {
      ++pos_;
      step.test = Step::Test::any_element;
      parse_predicates(step, /*value_step=*/false);
      return step;
    }

    std::string name = read_name();
    if (pos_ + 1 < text_.size() && text_[pos_] == ':' &&
        text_[pos_ + 1] == ':') {
      unsupported("axis '" + name + "::'", start);
    }
    if (pos_ < text_.size() && text_[pos_] == ':') {
      // Namespace prefix; matching is by local name, the prefix is ignored.
      ++pos_;
      name = read_name();
    }
    if (pos_ < text_.size() && text_[pos_] == '(') {
      if (name == "text") {
        ++pos_;
        if (pos_ >= text_.size() || text_[pos_] != ')') {
          fail("expected ')' after 'text('", pos_);
        }
        ++pos_;
        step.test = Step::Test::text;
        parse_predicates(step, /*value_step=*/true);
        return step;
      }
      unsupported("function '" + name + "()'", start);
    }
    step.test = Step::Test::element;
    step.name = name;
    parse_predicates(step, /*value_step=*/false);
    return step;
  }

  std::string local_of(std::string name, std::size_t start) {
    if (pos_ < text_.size() && text_[pos_] == ':') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == ':') {
        unsupported("axis '" + name + "::'", start);
      }
      ++pos_;
      return read_name();
    }
    return name;
  }

  void parse_predicates(Step& step, bool value_step) {
    while (pos_ < text_.size() && text_[pos_] == '[') {
      std::size_t start = pos_;
      ++pos_;
      if (pos_ >= text_.size()) fail("unterminated predicate", start);

      Predicate pred;
      if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        int value = 0;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          value = value * 10 + (text_[pos_] - '0');
          ++pos_;
        }
        if (value < 1) fail("position must be at least 1", start + 1);
        pred.kind = Predicate::Kind::position;
        pred.position = value;
      } else if (text_[pos_] == '@') {
        if (value_step) {
          fail("attribute predicate on a value step", start);
        }
        ++pos_;
        pred.kind = Predicate::Kind::attr_equals;
        pred.attr = read_name();
        if (pos_ >= text_.size()) fail("unterminated predicate", start);
        if (text_[pos_] == '!' || text_[pos_] == '<' || text_[pos_] == '>') {
          unsupported("comparison '" + std::string(1, text_[pos_]) + "'",
                      pos_);
        }
        if (text_[pos_] != '=') {
          unsupported("attribute existence predicate", start);
        }
        ++pos_;
        if (pos_ >= text_.size() ||
            (text_[pos_] != '\'' && text_[pos_] != '"')) {
          fail("expected a quoted value", pos_);
        }
        char quote = text_[pos_++];
        std::size_t value_start = pos_;
        while (pos_ < text_.size() && text_[pos_] != quote) ++pos_;
        if (pos_ >= text_.size()) fail("unterminated string", value_start - 1);
        pred.value = std::string(text_.substr(value_start, pos_ - value_start));
        ++pos_;
      } else if (is_name_start(text_[pos_])) {
        std::size_t name_start = pos_;
        std::string name = read_name();
        if (pos_ < text_.size() && text_[pos_] == '(') {
          unsupported("function '" + name + "()'", name_start);
        }
        unsupported("element test predicate", name_start);
      } else {
        fail("unexpected character in predicate", pos_);
      }

      if (pos_ >= text_.size() || text_[pos_] != ']') {
        fail("expected ']'", pos_);
      }
      ++pos_;
      step.predicates.push_back(std::move(pred));
    }
  }
};

void collect_descendants(const DocTree& tree, int node, std::vector<int>& out) {
  for (int child : tree.at(node).children) {
    out.push_back(child);
    collect_descendants(tree, child, out);
  }
}

bool element_matches(const Node& n, const Step& step) {
  if (n.kind != Node::Kind::element) return false;
  return step.test == Step::Test::any_element || n.local == step.name;
}

// One element step over the whole context set.  Positional predicates index
// into the combined result, in document order.
std::vector<int> apply_element_step(const DocTree& tree,
                                    const std::vector<int>& context,
                                    const Step& step) {
  std::vector<int> out;
  for (int node : context) {
    if (step.axis == Step::Axis::child) {
      for (int child : tree.at(node).children) {
        if (element_matches(tree.at(child), step)) out.push_back(child);
      }
    } else {
      std::vector<int> sub;
      collect_descendants(tree, node, sub);
      for (int d : sub) {
        if (element_matches(tree.at(d), step)) out.push_back(d);
      }
    }
  }
  // Node indices are assigned in document order during parsing, so sorting
  // restores document order; overlapping contexts can produce duplicates.
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());

  for (const Predicate& pred : step.predicates) {
    if (pred.kind == Predicate::Kind::position) {
      if (pred.position <= static_cast<int>(out.size())) {
        out = {out[static_cast<std::size_t>(pred.position - 1)]};
      } else {
        out.clear();
      }
    } else {
      std::vector<int> kept;
      for (int node : out) {
        const Attr* attr = tree.at(node).find_attr(pred.attr);
        if (attr && attr->value == pred.value) kept.push_back(node);
      }
      out = std::move(kept);
    }
  }
  return out;
}

std::vector<std::string> apply_positional(std::vector<std::string> values,
                                          const Step& step) {
  for (const Predicate& pred : step.predicates) {
    if (pred.position <= static_cast<int>(values.size())) {
      values = {values[static_cast<std::size_t>(pred.position - 1)]};
    } else {
      values.clear();
    }
  }
  return values;
}

// Runs the element steps, leaving any final value step unapplied.  Returns
// the element context for the final step and a pointer to it (null when the
// selector is element-final).
std::vector<int> run_element_steps(const Selector& sel, const DocTree& tree,
                                   int context, const Step** value_step) {
  *value_step = nullptr;
  if (tree.nodes.empty()) return {};
  std::vector<int> current{sel.absolute ? 0 : context};
  for (const Step& step : sel.steps) {
    if (step.test == Step::Test::attribute ||
        step.test == Step::Test::text) {
      *value_step = &step;
      break;  // final step by construction
    }
    current = apply_element_step(tree, current, step);
    if (current.empty()) break;
  }
  return current;
}

}  // namespace

Selector parse_selector(std::string_view text) { return Parser(text).run(); }

std::vector<std::string> evaluate_from(const Selector& sel,
                                       const DocTree& tree, int context) {
  const Step* value_step = nullptr;
  std::vector<int> nodes = run_element_steps(sel, tree, context, &value_step);
  std::vector<std::string> values;
  if (!value_step) {
    for (int node : nodes) values.push_back(tree.text_content(node));
    return values;
  }
  // Value steps are node-set selections too: overlapping contexts must not
  // produce duplicates, and results stay in document order.  Owning node
  // indices are collected first, deduplicated, then turned into strings.
  if (value_step->test == Step::Test::attribute) {
    std::vector<int> owners;
    for (int node : nodes) {
      if (value_step->axis == Step::Axis::descendant) {
        std::vector<int> sub{node};
        collect_descendants(tree, node, sub);
        for (int d : sub) {
          if (tree.at(d).kind == Node::Kind::element &&
              tree.at(d).find_attr(value_step->name)) {
            owners.push_back(d);
          }
        }
      } else if (tree.at(node).find_attr(value_step->name)) {
        owners.push_back(node);
      }
    }
    std::sort(owners.begin(), owners.end());
    owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
    for (int d : owners) {
      values.push_back(tree.at(d).find_attr(value_step->name)->value);
    }
  } else {
    std::vector<int> sources;
    for (int node : nodes) {
      if (value_step->axis == Step::Axis::descendant) {
        std::vector<int> sub;
        collect_descendants(tree, node, sub);
        for (int d : sub) {
          if (tree.at(d).kind == Node::Kind::text) sources.push_back(d);
        }
      } else {
        for (int child : tree.at(node).children) {
          if (tree.at(child).kind == Node::Kind::text) {
            sources.push_back(child);
          }
        }
      }
    }
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    for (int d : sources) values.push_back(tree.at(d).text);
  }
  return apply_positional(std::move(values), *value_step);
}

std::vector<std::string> evaluate(const Selector& sel, const DocTree& tree) {
  return evaluate_from(sel, tree, 0);
}

std::vector<int> select_nodes(const Selector& sel, const DocTree& tree,
                              int context) {
  const Step* value_step = nullptr;
  std::vector<int> nodes = run_element_steps(sel, tree, context, &value_step);
  if (value_step) {
    throw SelectorError("selector does not select elements", 0,
                        /*unsupported=*/false);
  }
  return nodes;
}

}  // namespace rell
