#include "rell/doc.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

#include "rell/diag.hpp"

namespace rell {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || c == ':';
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string local_part(std::string_view qname) {
  auto colon = qname.rfind(':');
  return std::string(colon == std::string_view::npos
                         ? qname
                         : qname.substr(colon + 1));
}

std::string utf8_encode(std::uint32_t cp) {
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

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  bool eof() const { return pos >= text.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  bool starts_with(std::string_view s) const {
    return text.substr(pos, s.size()) == s;
  }
  bool starts_with_ci(std::string_view lower) const {
    if (pos + lower.size() > text.size()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(text[pos + i])) != lower[i]) {
        return false;
      }
    }
    return true;
  }
  void advance() {
    if (eof()) return;
    if (text[pos] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++pos;
  }
  void advance(std::size_t n) {
    while (n-- > 0) advance();
  }
  void skip_space() {
    while (!eof() && is_space(peek())) advance();
  }
};

// Decodes one entity at '&'.  Appends the replacement (or, when tolerant,
// the literal input) to out and returns true; in strict mode malformed or
// unknown entities throw instead.
bool decode_entity(Cursor& c, bool strict, std::string& out) {
  const std::size_t at_line = c.line;
  const std::size_t at_col = c.column;
  std::size_t i = c.pos + 1;  // past '&'
  const std::string_view text = c.text;

  auto fail = [&](const std::string& what) -> bool {
    if (strict) throw XmlError(what, at_line, at_col);
    out += '&';
    c.advance();
    return true;
  };

  if (i < text.size() && text[i] == '#') {
    ++i;
    bool hex = i < text.size() && (text[i] == 'x' || text[i] == 'X');
    if (hex) ++i;
    std::uint32_t cp = 0;
    std::size_t digits = 0;
    while (i < text.size()) {
      char d = text[i];
      int v;
      if (d >= '0' && d <= '9') {
        v = d - '0';
      } else if (hex && d >= 'a' && d <= 'f') {
        v = d - 'a' + 10;
      } else if (hex && d >= 'A' && d <= 'F') {
        v = d - 'A' + 10;
      } else {
        break;
      }
      cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
      if (cp > 0x10FFFF) cp = 0x110000;  // clamp, reported below
      ++digits;
      ++i;
    }
    if (digits == 0 || i >= text.size() || text[i] != ';') {
      return fail("malformed character reference");
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) || cp == 0) {
      return fail("character reference out of range");
    }
    out += utf8_encode(cp);
    c.advance(i + 1 - c.pos);
    return true;
  }

  std::size_t name_start = i;
  while (i < text.size() &&
         std::isalnum(static_cast<unsigned char>(text[i]))) {
    ++i;
  }
  if (i == name_start || i >= text.size() || text[i] != ';') {
    return fail("bare '&' in content");
  }
  std::string_view name = text.substr(name_start, i - name_start);
  const char* repl = nullptr;
  if (name == "lt") repl = "<";
  else if (name == "gt") repl = ">";
  else if (name == "amp") repl = "&";
  else if (name == "apos") repl = "'";
  else if (name == "quot") repl = "\"";
  if (!repl) {
    if (strict) {
      throw XmlError("unknown entity '&" + std::string(name) + ";'", at_line,
                     at_col);
    }
    // Tolerant mode keeps unknown entities literally.
    out.append(text.substr(c.pos, i + 1 - c.pos));
    c.advance(i + 1 - c.pos);
    return true;
  }
  out += repl;
  c.advance(i + 1 - c.pos);
  return true;
}

// ---------------------------------------------------------------- strict XML

class XmlParser {
 public:
  explicit XmlParser(std::string_view text) { c_.text = text; }

  DocTree run() {
    Node doc;
    doc.kind = Node::Kind::document;
    doc.line = 1;
    doc.column = 1;
    tree_.nodes.push_back(std::move(doc));
    stack_.push_back(0);

    if (c_.starts_with("\xEF\xBB\xBF")) c_.advance(3);

    while (!c_.eof()) {
      if (c_.peek() == '<') {
        if (c_.starts_with("<?")) {
          skip_pi();
        } else if (c_.starts_with("<!--")) {
          skip_comment();
        } else if (c_.starts_with("<![CDATA[")) {
          read_cdata();
        } else if (c_.starts_with("<!DOCTYPE")) {
          skip_doctype();
        } else if (c_.starts_with("</")) {
          read_end_tag();
        } else {
          read_start_tag();
        }
      } else {
        read_text();
      }
    }

    if (stack_.size() > 1) {
      const Node& open = tree_.at(stack_.back());
      throw XmlError("unexpected end of input inside <" + open.name + ">",
                     c_.line, c_.column);
    }
    if (tree_.root_element() < 0) {
      throw XmlError("no root element", c_.line, c_.column);
    }
    return std::move(tree_);
  }

 private:
  Cursor c_;
  DocTree tree_;
  std::vector<int> stack_;
  // Innermost-last namespace bindings; marks_ records the scope size at each
  // element open so closing restores it.
  std::vector<std::pair<std::string, std::string>> ns_scope_;
  std::vector<std::size_t> ns_marks_;

  [[noreturn]] void error(const std::string& what) {
    throw XmlError(what, c_.line, c_.column);
  }
  [[noreturn]] void error_at(const std::string& what, std::size_t line,
                             std::size_t col) {
    throw XmlError(what, line, col);
  }

  int append_node(Node node) {
    int index = static_cast<int>(tree_.nodes.size());
    node.parent = stack_.back();
    tree_.nodes.push_back(std::move(node));
    tree_.nodes[static_cast<std::size_t>(stack_.back())].children.push_back(
        index);
    return index;
  }

  void append_text(std::string value, std::size_t line, std::size_t col) {
    if (stack_.size() == 1) {
      bool ws_only = std::all_of(value.begin(), value.end(), [](char ch) {
        return is_space(ch);
      });
      if (ws_only) return;
      error_at("text outside the root element", line, col);
    }
    Node text;
    text.kind = Node::Kind::text;
    text.text = std::move(value);
    text.line = line;
    text.column = col;
    append_node(std::move(text));
  }

  std::string read_name() {
    if (c_.eof() || !is_name_start(c_.peek())) error("expected a name");
    std::size_t start = c_.pos;
    while (!c_.eof() && is_name_char(c_.peek())) c_.advance();
    return std::string(c_.text.substr(start, c_.pos - start));
  }

  void expect(char ch, const char* what) {
    if (c_.peek() != ch) error(std::string("expected ") + what);
    c_.advance();
  }

  void skip_pi() {
    c_.advance(2);
    while (!c_.eof() && !c_.starts_with("?>")) c_.advance();
    if (c_.eof()) error("unterminated processing instruction");
    c_.advance(2);
  }

  void skip_comment() {
    c_.advance(4);
    while (!c_.eof() && !c_.starts_with("-->")) c_.advance();
    if (c_.eof()) error("unterminated comment");
    c_.advance(3);
  }

  void skip_doctype() {
    c_.advance(9);
    int bracket_depth = 0;
    while (!c_.eof()) {
      char ch = c_.peek();
      if (ch == '[') ++bracket_depth;
      if (ch == ']') --bracket_depth;
      if (ch == '>' && bracket_depth <= 0) {
        c_.advance();
        return;
      }
      c_.advance();
    }
    error("unterminated DOCTYPE");
  }

  void read_cdata() {
    std::size_t line = c_.line, col = c_.column;
    c_.advance(9);
    std::size_t start = c_.pos;
    while (!c_.eof() && !c_.starts_with("]]>")) c_.advance();
    if (c_.eof()) error("unterminated CDATA section");
    append_text(std::string(c_.text.substr(start, c_.pos - start)), line, col);
    c_.advance(3);
  }

  void read_text() {
    std::size_t line = c_.line, col = c_.column;
    std::string value;
    while (!c_.eof() && c_.peek() != '<') {
      if (c_.peek() == '&') {
        decode_entity(c_, /*strict=*/true, value);
      } else {
        value += c_.peek();
        c_.advance();
      }
    }
    append_text(std::move(value), line, col);
  }

  std::string read_attr_value() {
    char quote = c_.peek();
    if (quote != '"' && quote != '\'') error("expected a quoted value");
    c_.advance();
    std::string value;
    while (!c_.eof() && c_.peek() != quote) {
      if (c_.peek() == '<') error("'<' in attribute value");
      if (c_.peek() == '&') {
        decode_entity(c_, /*strict=*/true, value);
      } else {
        value += c_.peek();
        c_.advance();
      }
    }
    if (c_.eof()) error("unterminated attribute value");
    c_.advance();
    return value;
  }

  std::string resolve_ns(std::string_view qname, std::size_t line,
                         std::size_t col) {
    auto colon = qname.rfind(':');
    std::string prefix(colon == std::string_view::npos ? ""
                                                       : qname.substr(0, colon));
    for (auto it = ns_scope_.rbegin(); it != ns_scope_.rend(); ++it) {
      if (it->first == prefix) return it->second;
    }
    if (prefix.empty()) return "";
    error_at("unbound namespace prefix '" + prefix + "'", line, col);
  }

  void read_start_tag() {
    std::size_t line = c_.line, col = c_.column;
    c_.advance();  // '<'
    std::string name = read_name();

    if (stack_.size() == 1 && tree_.root_element() >= 0) {
      error_at("multiple root elements", line, col);
    }

    Node elem;
    elem.kind = Node::Kind::element;
    elem.name = name;
    elem.local = local_part(name);
    elem.line = line;
    elem.column = col;

    std::size_t ns_mark = ns_scope_.size();
    for (;;) {
      c_.skip_space();
      if (c_.eof()) error("unterminated start tag");
      if (c_.peek() == '>' || c_.starts_with("/>")) break;
      std::size_t attr_line = c_.line, attr_col = c_.column;
      std::string attr_name = read_name();
      c_.skip_space();
      expect('=', "'=' after attribute name");
      c_.skip_space();
      std::string value = read_attr_value();

      if (attr_name == "xmlns") {
        ns_scope_.emplace_back("", value);
      } else if (attr_name.rfind("xmlns:", 0) == 0) {
        ns_scope_.emplace_back(attr_name.substr(6), value);
      }
      for (const Attr& existing : elem.attrs) {
        if (existing.name == attr_name) {
          error_at("duplicate attribute '" + attr_name + "'", attr_line,
                   attr_col);
        }
      }
      elem.attrs.push_back({attr_name, local_part(attr_name), value});
    }

    elem.ns = resolve_ns(name, line, col);

    bool self_closing = c_.peek() == '/';
    if (self_closing) c_.advance();
    expect('>', "'>'");

    int index = append_node(std::move(elem));
    if (self_closing) {
      ns_scope_.resize(ns_mark);
    } else {
      stack_.push_back(index);
      ns_marks_.push_back(ns_mark);
    }
  }

  void read_end_tag() {
    std::size_t line = c_.line, col = c_.column;
    c_.advance(2);  // "</"
    std::string name = read_name();
    c_.skip_space();
    expect('>', "'>'");
    if (stack_.size() == 1) {
      error_at("end tag </" + name + "> without an open element", line, col);
    }
    const Node& open = tree_.at(stack_.back());
    if (open.name != name) {
      error_at("mismatched end tag: expected </" + open.name + ">, found </" +
                   name + ">",
               line, col);
    }
    stack_.pop_back();
    ns_scope_.resize(ns_marks_.back());
    ns_marks_.pop_back();
  }
};

// -------------------------------------------------------------- tolerant HTML

const std::array<std::string_view, 14> kVoidElements = {
    "area", "base",  "br",    "col",  "embed",  "hr",    "img",
    "input", "link", "meta",  "param", "source", "track", "wbr"};

const std::array<std::string_view, 4> kRawTextElements = {"script", "style",
                                                          "textarea", "title"};

const std::array<std::string_view, 6> kHeadElements = {"title", "meta", "link",
                                                       "base",  "style", "script"};

// Start tags that implicitly close an open <p>.
const std::array<std::string_view, 31> kClosesP = {
    "address", "article", "aside",   "blockquote", "details", "div",
    "dl",      "fieldset", "figcaption", "figure", "footer",  "form",
    "h1",      "h2",      "h3",      "h4",         "h5",      "h6",
    "header",  "hr",      "main",    "nav",        "ol",      "p",
    "pre",     "section", "table",   "ul",         "li",      "dd",
    "dt"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set,
              std::string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

// True when an open element must close before the incoming start tag.
bool closes_before(std::string_view open, std::string_view incoming) {
  if (open == "p") return contains(kClosesP, incoming);
  if (open == "li") return incoming == "li";
  if (open == "dd" || open == "dt") {
    return incoming == "dd" || incoming == "dt";
  }
  if (open == "td" || open == "th") {
    return incoming == "td" || incoming == "th" || incoming == "tr";
  }
  if (open == "tr") return incoming == "tr";
  if (open == "option") return incoming == "option" || incoming == "optgroup";
  return false;
}

class HtmlParser {
 public:
  explicit HtmlParser(std::string_view text) { c_.text = text; }

  DocTree run() {
    Node doc;
    doc.kind = Node::Kind::document;
    doc.line = 1;
    doc.column = 1;
    tree_.nodes.push_back(std::move(doc));
    stack_.push_back(0);

    if (c_.starts_with("\xEF\xBB\xBF")) c_.advance(3);

    while (!c_.eof()) {
      if (c_.peek() == '<') {
        if (c_.starts_with("<!--")) {
          skip_comment();
        } else if (c_.starts_with_ci("<!doctype")) {
          skip_until('>');
        } else if (c_.starts_with("<?") || c_.starts_with("<!")) {
          skip_until('>');  // bogus markup, dropped
        } else if (c_.starts_with("</")) {
          read_end_tag();
        } else if (is_name_start(c_.peek(1))) {
          read_start_tag();
        } else {
          text_buffer_ += '<';  // stray '<' is literal text
          c_.advance();
        }
      } else {
        read_text_run();
      }
    }
    flush_text(c_.line, c_.column);
    return std::move(tree_);
  }

 private:
  enum class Mode { before_html, before_head, in_head, after_head, in_body };

  Cursor c_;
  DocTree tree_;
  std::vector<int> stack_;
  Mode mode_ = Mode::before_html;
  int html_ = -1;
  int head_ = -1;
  int body_ = -1;
  std::string text_buffer_;
  std::size_t text_line_ = 1;
  std::size_t text_col_ = 1;

  int append_under(int parent, Node node) {
    int index = static_cast<int>(tree_.nodes.size());
    node.parent = parent;
    tree_.nodes.push_back(std::move(node));
    tree_.nodes[static_cast<std::size_t>(parent)].children.push_back(index);
    return index;
  }

  int make_element(int parent, std::string name, std::size_t line,
                   std::size_t col, std::vector<Attr> attrs = {}) {
    Node elem;
    elem.kind = Node::Kind::element;
    elem.local = name;
    elem.name = std::move(name);
    elem.attrs = std::move(attrs);
    elem.line = line;
    elem.column = col;
    return append_under(parent, std::move(elem));
  }

  void ensure_html(std::size_t line, std::size_t col,
                   std::vector<Attr> attrs = {}) {
    if (html_ >= 0) return;
    html_ = make_element(0, "html", line, col, std::move(attrs));
    stack_.push_back(html_);
    mode_ = Mode::before_head;
  }

  void ensure_head(std::size_t line, std::size_t col,
                   std::vector<Attr> attrs = {}) {
    ensure_html(line, col);
    if (head_ >= 0) return;
    head_ = make_element(html_, "head", line, col, std::move(attrs));
    mode_ = Mode::in_head;
  }

  void close_head() {
    if (mode_ == Mode::in_head) {
      while (stack_.back() != html_) stack_.pop_back();
      mode_ = Mode::after_head;
    }
  }

  void ensure_body(std::size_t line, std::size_t col,
                   std::vector<Attr> attrs = {}) {
    ensure_html(line, col);
    if (head_ < 0) head_ = make_element(html_, "head", line, col);
    close_head();
    if (body_ >= 0) return;
    while (stack_.back() != html_) stack_.pop_back();
    body_ = make_element(html_, "body", line, col, std::move(attrs));
    stack_.push_back(body_);
    mode_ = Mode::in_body;
  }

  void flush_text(std::size_t, std::size_t) {
    if (text_buffer_.empty()) return;
    std::string value = std::move(text_buffer_);
    text_buffer_.clear();
    bool ws_only = std::all_of(value.begin(), value.end(), [](char ch) {
      return is_space(ch);
    });
    if (mode_ != Mode::in_body) {
      // Whitespace between the top-level scaffolding elements is dropped;
      // any other text implies the body.
      if (ws_only) return;
      ensure_body(text_line_, text_col_);
    }
    Node text;
    text.kind = Node::Kind::text;
    text.text = std::move(value);
    text.line = text_line_;
    text.column = text_col_;
    append_under(stack_.back(), std::move(text));
  }

  void skip_comment() {
    c_.advance(4);
    while (!c_.eof() && !c_.starts_with("-->")) c_.advance();
    c_.advance(3);
  }

  void skip_until(char ch) {
    while (!c_.eof() && c_.peek() != ch) c_.advance();
    c_.advance();
  }

  void read_text_run() {
    if (text_buffer_.empty()) {
      text_line_ = c_.line;
      text_col_ = c_.column;
    }
    while (!c_.eof() && c_.peek() != '<') {
      if (c_.peek() == '&') {
        decode_entity(c_, /*strict=*/false, text_buffer_);
      } else {
        text_buffer_ += c_.peek();
        c_.advance();
      }
    }
  }

  std::string read_name_lower() {
    std::size_t start = c_.pos;
    while (!c_.eof() && is_name_char(c_.peek())) c_.advance();
    return to_lower(c_.text.substr(start, c_.pos - start));
  }

  // Reads attributes until '>' or EOF.  Returns false when the tag never
  // terminates (dropped, HTML5-style).
  bool read_attrs(std::vector<Attr>& attrs, bool& self_closing) {
    self_closing = false;
    for (;;) {
      c_.skip_space();
      if (c_.eof()) return false;
      char ch = c_.peek();
      if (ch == '>') {
        c_.advance();
        return true;
      }
      if (ch == '/') {
        c_.advance();
        if (c_.peek() == '>') {
          c_.advance();
          self_closing = true;
          return true;
        }
        continue;  // stray slash, skipped
      }
      std::size_t start = c_.pos;
      while (!c_.eof() && !is_space(c_.peek()) && c_.peek() != '=' &&
             c_.peek() != '>' && c_.peek() != '/') {
        c_.advance();
      }
      if (c_.pos == start) {
        c_.advance();  // unparsable byte inside the tag
        continue;
      }
      std::string name = to_lower(c_.text.substr(start, c_.pos - start));
      std::string value;
      c_.skip_space();
      if (c_.peek() == '=') {
        c_.advance();
        c_.skip_space();
        char quote = c_.peek();
        if (quote == '"' || quote == '\'') {
          c_.advance();
          while (!c_.eof() && c_.peek() != quote) {
            if (c_.peek() == '&') {
              decode_entity(c_, /*strict=*/false, value);
            } else {
              value += c_.peek();
              c_.advance();
            }
          }
          c_.advance();
        } else {
          while (!c_.eof() && !is_space(c_.peek()) && c_.peek() != '>') {
            if (c_.peek() == '&') {
              decode_entity(c_, /*strict=*/false, value);
            } else {
              value += c_.peek();
              c_.advance();
            }
          }
        }
      }
      bool duplicate = false;
      for (const Attr& existing : attrs) {
        if (existing.name == name) duplicate = true;  // first wins
      }
      if (!duplicate) attrs.push_back({name, local_part(name), value});
    }
  }

  void read_raw_text(int elem, const std::string& name) {
    bool decode = name == "textarea" || name == "title";
    std::string end = "</" + name;
    std::size_t line = c_.line, col = c_.column;
    std::string value;
    while (!c_.eof()) {
      if (c_.peek() == '<' && c_.starts_with_ci(end)) {
        char after = c_.peek(end.size());
        if (after == '>' || is_space(after) || after == '/' ||
            after == '\0') {
          break;
        }
      }
      if (decode && c_.peek() == '&') {
        decode_entity(c_, /*strict=*/false, value);
      } else {
        value += c_.peek();
        c_.advance();
      }
    }
    if (!value.empty()) {
      Node text;
      text.kind = Node::Kind::text;
      text.text = std::move(value);
      text.line = line;
      text.column = col;
      append_under(elem, std::move(text));
    }
    if (!c_.eof()) {
      c_.advance(end.size());
      skip_until('>');
    }
  }

  void read_start_tag() {
    std::size_t line = c_.line, col = c_.column;
    std::size_t tag_start = c_.pos;
    c_.advance();  // '<'
    std::string name = read_name_lower();
    std::vector<Attr> attrs;
    bool self_closing = false;
    if (!read_attrs(attrs, self_closing)) {
      // Unterminated tag at EOF: emit what was consumed as literal text.
      flush_text(line, col);
      text_line_ = line;
      text_col_ = col;
      text_buffer_ = std::string(c_.text.substr(tag_start));
      flush_text(line, col);
      return;
    }
    flush_text(line, col);

    if (name == "html") {
      if (html_ < 0) {
        ensure_html(line, col, std::move(attrs));
      }
      return;  // duplicate <html> dropped
    }
    if (name == "head") {
      if (head_ < 0 && (mode_ == Mode::before_html ||
                        mode_ == Mode::before_head)) {
        ensure_head(line, col, std::move(attrs));
      }
      return;
    }
    if (name == "body") {
      if (body_ < 0) {
        ensure_body(line, col, std::move(attrs));
      }
      return;
    }

    if (mode_ != Mode::in_body && contains(kHeadElements, name)) {
      ensure_head(line, col);
      int parent = head_;
      int elem = make_element(parent, name, line, col, std::move(attrs));
      if (contains(kVoidElements, name) || self_closing) return;
      if (contains(kRawTextElements, name)) {
        read_raw_text(elem, name);
        return;
      }
      stack_.push_back(elem);
      return;
    }

    ensure_body(line, col);

    while (stack_.back() != body_ &&
           closes_before(tree_.at(stack_.back()).name, name)) {
      stack_.pop_back();
    }

    int elem = make_element(stack_.back(), name, line, col, std::move(attrs));
    if (contains(kVoidElements, name) || self_closing) return;
    if (contains(kRawTextElements, name)) {
      read_raw_text(elem, name);
      return;
    }
    stack_.push_back(elem);
  }

  void read_end_tag() {
    std::size_t line = c_.line, col = c_.column;
    c_.advance(2);  // "</"
    if (c_.eof() || !is_name_start(c_.peek())) {
      skip_until('>');  // bogus end tag
      return;
    }
    std::string name = read_name_lower();
    skip_until('>');
    flush_text(line, col);

    if (name == "html") return;  // body stays open until EOF
    if (name == "body") {
      if (body_ >= 0) {
        while (stack_.back() != body_) stack_.pop_back();
      }
      return;
    }
    if (name == "head") {
      close_head();
      return;
    }

    // Close the nearest matching open element along with everything opened
    // inside it; a stray end tag with no match is dropped.
    for (std::size_t i = stack_.size(); i-- > 0;) {
      int node = stack_[i];
      if (node == body_ || node == html_ || node == 0) break;
      if (tree_.at(node).name == name) {
        stack_.resize(i);
        return;
      }
    }
  }
};

}  // namespace

const Attr* Node::find_attr(std::string_view local_name) const {
  for (const Attr& attr : attrs) {
    if (attr.local == local_name) return &attr;
  }
  return nullptr;
}

int DocTree::root_element() const {
  if (nodes.empty()) return -1;
  for (int child : nodes[0].children) {
    if (at(child).kind == Node::Kind::element) return child;
  }
  return -1;
}

std::string DocTree::text_content(int index) const {
  std::string out;
  std::vector<int> work{index};
  while (!work.empty()) {
    int node = work.back();
    work.pop_back();
    const Node& n = at(node);
    if (n.kind == Node::Kind::text) out += n.text;
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      work.push_back(*it);
    }
  }
  return out;
}

DocTree parse_xml(std::string_view text) { return XmlParser(text).run(); }

DocTree parse_html(std::string_view text) { return HtmlParser(text).run(); }

std::string media_type_base(std::string_view content_type) {
  auto semi = content_type.find(';');
  if (semi != std::string_view::npos) {
    content_type = content_type.substr(0, semi);
  }
  while (!content_type.empty() && is_space(content_type.front())) {
    content_type.remove_prefix(1);
  }
  while (!content_type.empty() && is_space(content_type.back())) {
    content_type.remove_suffix(1);
  }
  return to_lower(content_type);
}

bool is_xml_media_type(std::string_view media_type) {
  if (media_type == "application/xml" || media_type == "text/xml") return true;
  return media_type.size() > 4 &&
         media_type.substr(media_type.size() - 4) == "+xml";
}

std::optional<DocTree> parse_document(std::string_view body,
                                      std::string_view media_type) {
  std::string base = media_type_base(media_type);
  if (is_xml_media_type(base)) return parse_xml(body);
  if (base == "text/html") return parse_html(body);
  return std::nullopt;
}

}  // namespace rell
