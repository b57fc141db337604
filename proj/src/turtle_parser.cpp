#include <algorithm>
#include <map>
#include <regex>
#include <variant>

#include <fmt/format.h>

#include "ppr/capability.hpp"
#include "ppr/turtle.hpp"

namespace ppr::ttl {

namespace {

enum class Tok {
  IriRef,
  PName,
  A,
  String,
  Number,
  Boolean,
  Caret2,
  LangTag,
  Dot,
  Semicolon,
  Comma,
  PrefixDirective,
  SparqlPrefix,
  Eof,
  Error,
};

struct Token {
  Tok type = Tok::Eof;
  std::string text;  // unescaped string body, IRI, lexical form or error text
  SourcePos pos;
};

struct SyntaxError {
  SourcePos pos;
  std::string message;
};

void append_utf8(std::string& out, char32_t cp) {
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
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || c == ':' || static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_blank();
    Token tok;
    tok.pos = pos_;
    if (at_end()) {
      tok.type = Tok::Eof;
      return tok;
    }
    char c = peek();
    if (c == '<') return lex_iri(tok);
    if (c == '"' || c == '\'') return lex_string(tok);
    if (c == '@') return lex_at(tok);
    if (c == '^') {
      advance();
      if (!at_end() && peek() == '^') {
        advance();
        tok.type = Tok::Caret2;
        return tok;
      }
      return error(tok, "expected '^^'");
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return lex_number(tok);
    }
    if (c == '.') return punct(tok, Tok::Dot);
    if (c == ';') return punct(tok, Tok::Semicolon);
    if (c == ',') return punct(tok, Tok::Comma);
    if (c == '[' || c == '(') {
      advance();
      return error(tok, "blank nodes and collections are not supported");
    }
    if (c == '_' && peek(1) == ':') {
      advance();
      advance();
      return error(tok, "blank nodes are not supported");
    }
    if (is_name_char(c)) return lex_name(tok);
    advance();
    return error(tok, fmt::format("unexpected character '{}'", c));
  }

  SourcePos end_pos() const { return end_pos_; }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
  }
  char advance() {
    char c = text_[i_++];
    end_pos_ = pos_;
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    return c;
  }

  void skip_blank() {
    while (!at_end()) {
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token punct(Token& tok, Tok type) {
    advance();
    tok.type = type;
    return tok;
  }

  Token error(Token& tok, std::string message) {
    tok.type = Tok::Error;
    tok.text = std::move(message);
    return tok;
  }

  Token lex_iri(Token& tok) {
    advance();
    while (!at_end() && peek() != '>') {
      char c = peek();
      if (c == '\n' || c == ' ' || c == '<' || c == '"') {
        return error(tok, "unterminated IRI");
      }
      tok.text += advance();
    }
    if (at_end()) return error(tok, "unterminated IRI");
    advance();
    tok.type = Tok::IriRef;
    return tok;
  }

  bool read_hex(int digits, char32_t& cp) {
    cp = 0;
    for (int k = 0; k < digits; ++k) {
      char h = peek();
      if (!std::isxdigit(static_cast<unsigned char>(h))) return false;
      advance();
      cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(h))
                                               ? h - '0'
                                               : std::tolower(h) - 'a' + 10);
    }
    return true;
  }

  Token lex_string(Token& tok) {
    const char quote = peek();
    bool long_form = peek(1) == quote && peek(2) == quote;
    advance();
    if (long_form) {
      advance();
      advance();
    }
    for (;;) {
      if (at_end()) return error(tok, "unterminated string literal");
      char c = peek();
      if (long_form) {
        if (c == quote && peek(1) == quote && peek(2) == quote) {
          advance();
          advance();
          advance();
          break;
        }
      } else {
        if (c == quote) {
          advance();
          break;
        }
        if (c == '\n' || c == '\r') return error(tok, "unterminated string literal");
      }
      if (c == '\\') {
        advance();
        if (at_end()) return error(tok, "unterminated string literal");
        char e = advance();
        switch (e) {
          case 't': tok.text += '\t'; break;
          case 'b': tok.text += '\b'; break;
          case 'n': tok.text += '\n'; break;
          case 'r': tok.text += '\r'; break;
          case 'f': tok.text += '\f'; break;
          case '"': tok.text += '"'; break;
          case '\'': tok.text += '\''; break;
          case '\\': tok.text += '\\'; break;
          case 'u':
          case 'U': {
            char32_t cp = 0;
            if (!read_hex(e == 'u' ? 4 : 8, cp) || cp > 0x10FFFF) {
              return error(tok, "invalid unicode escape");
            }
            append_utf8(tok.text, cp);
            break;
          }
          default:
            return error(tok, fmt::format("invalid escape '\\{}'", e));
        }
        continue;
      }
      tok.text += advance();
    }
    tok.type = Tok::String;
    return tok;
  }

  Token lex_at(Token& tok) {
    advance();
    std::string word;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
      word += advance();
    }
    if (word == "prefix") {
      tok.type = Tok::PrefixDirective;
      return tok;
    }
    if (word == "base") return error(tok, "@base is not supported");
    tok.type = Tok::LangTag;
    tok.text = word;
    return tok;
  }

  Token lex_number(Token& tok) {
    auto digits = [&] {
      bool any = false;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        tok.text += advance();
        any = true;
      }
      return any;
    };
    if (peek() == '+' || peek() == '-') tok.text += advance();
    bool int_part = digits();
    bool frac = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      tok.text += advance();
      frac = digits();
    } else if (int_part && peek() == '.' && (peek(1) == 'e' || peek(1) == 'E')) {
      tok.text += advance();
    }
    if (!int_part && !frac) return error(tok, "invalid number");
    if (peek() == 'e' || peek() == 'E') {
      tok.text += advance();
      if (peek() == '+' || peek() == '-') tok.text += advance();
      if (!digits()) return error(tok, "invalid number exponent");
    }
    if (is_name_char(peek()) && peek() != '.') {
      return error(tok, fmt::format("invalid number '{}{}'", tok.text, peek()));
    }
    tok.type = Tok::Number;
    return tok;
  }

  Token lex_name(Token& tok) {
    std::size_t start = i_;
    std::size_t end = i_;
    while (end < text_.size() && is_name_char(text_[end])) ++end;
    // A trailing '.' terminates the statement rather than the name.
    while (end > start && text_[end - 1] == '.') --end;
    while (i_ < end) advance();
    std::string word(text_.substr(start, end - start));
    if (word.find(':') != std::string::npos) {
      tok.type = Tok::PName;
      tok.text = std::move(word);
      return tok;
    }
    if (word == "a") {
      tok.type = Tok::A;
    } else if (word == "true" || word == "false") {
      tok.type = Tok::Boolean;
      tok.text = std::move(word);
    } else if (word == "PREFIX" || word == "prefix") {
      tok.type = Tok::SparqlPrefix;
    } else if (word == "BASE" || word == "base") {
      return error(tok, "BASE is not supported");
    } else {
      return error(tok, fmt::format("unexpected word '{}'", word));
    }
    return tok;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  SourcePos pos_{1, 1};
  SourcePos end_pos_{1, 1};
};

struct Literal {
  std::string text;
  Tok lexical_type = Tok::String;  // String, Number or Boolean
  std::optional<std::string> datatype;
};

struct Triple {
  Iri subject;
  SourcePos subject_pos;
  Iri predicate;
  std::variant<Iri, Literal> object;
  SourcePos object_pos;
};

bool looks_absolute_iri(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  return std::all_of(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(colon), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
  });
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {
    for (const auto& [p, base] : standard_prefixes()) prefixes_[p] = base;
    advance();
  }

  void run() {
    while (current_.type != Tok::Eof) {
      try {
        statement();
      } catch (const SyntaxError& e) {
        errors_.push_back({e.pos.line, e.pos.column, e.message, {}});
        recover();
      }
    }
  }

  std::vector<Triple> triples;
  std::vector<std::pair<std::string, std::string>> declared;
  std::vector<ParseError> errors_;
  SourcePos end_pos() const { return lexer_.end_pos(); }

 private:
  void advance() { current_ = lexer_.next(); }

  [[noreturn]] void fail(const Token& tok, std::string message) {
    throw SyntaxError{tok.pos, std::move(message)};
  }

  void check_lex(const Token& tok) {
    if (tok.type == Tok::Error) fail(tok, tok.text);
  }

  void expect(Tok type, std::string_view what) {
    check_lex(current_);
    if (current_.type != type) fail(current_, fmt::format("expected {}", what));
    advance();
  }

  void recover() {
    while (current_.type != Tok::Eof && current_.type != Tok::Dot) advance();
    if (current_.type == Tok::Dot) advance();
  }

  void statement() {
    check_lex(current_);
    if (current_.type == Tok::PrefixDirective) {
      advance();
      prefix_body();
      expect(Tok::Dot, "'.' after @prefix directive");
      return;
    }
    if (current_.type == Tok::SparqlPrefix) {
      advance();
      prefix_body();
      return;
    }
    triples_statement();
    expect(Tok::Dot, "'.' at end of statement");
  }

  void prefix_body() {
    check_lex(current_);
    if (current_.type != Tok::PName || current_.text.back() != ':' ||
        current_.text.find(':') != current_.text.size() - 1) {
      fail(current_, "expected prefix name ending in ':'");
    }
    std::string prefix = current_.text.substr(0, current_.text.size() - 1);
    if (!prefix.empty() && !is_identifier(prefix)) {
      fail(current_, fmt::format("invalid prefix name '{}'", prefix));
    }
    Token name_tok = current_;
    advance();
    check_lex(current_);
    if (current_.type != Tok::IriRef) fail(current_, "expected <IRI> in prefix directive");
    if (!looks_absolute_iri(current_.text)) fail(current_, "relative IRIs are not supported");
    if (auto std_it = standard_prefixes().find(prefix);
        std_it != standard_prefixes().end() && std_it->second != current_.text) {
      fail(name_tok, fmt::format("prefix '{}:' is reserved for <{}>", prefix, std_it->second));
    }
    prefixes_[prefix] = current_.text;
    declared.emplace_back(prefix, current_.text);
    advance();
  }

  Iri resolve(const Token& tok) {
    if (tok.type == Tok::IriRef) {
      if (!looks_absolute_iri(tok.text)) fail(tok, "relative IRIs are not supported");
      return Iri{tok.text};
    }
    auto colon = tok.text.find(':');
    std::string prefix = tok.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      fail(tok, fmt::format("undeclared prefix '{}:'", prefix));
    }
    return Iri{it->second + tok.text.substr(colon + 1)};
  }

  Iri iri_term(std::string_view role) {
    check_lex(current_);
    if (current_.type != Tok::IriRef && current_.type != Tok::PName) {
      fail(current_, fmt::format("expected IRI as {}", role));
    }
    Iri iri = resolve(current_);
    advance();
    return iri;
  }

  void triples_statement() {
    SourcePos subject_pos = current_.pos;
    Iri subject = iri_term("subject");
    for (;;) {
      check_lex(current_);
      Iri predicate;
      if (current_.type == Tok::A) {
        predicate = Iri{std::string(kRdfNamespace) + "type"};
        advance();
      } else {
        predicate = iri_term("predicate");
      }
      for (;;) {
        object(subject, subject_pos, predicate);
        if (current_.type != Tok::Comma) break;
        advance();
      }
      if (current_.type != Tok::Semicolon) break;
      while (current_.type == Tok::Semicolon) advance();
      // Trailing ';' before '.' is allowed.
      if (current_.type == Tok::Dot) break;
    }
  }

  void object(const Iri& subject, SourcePos subject_pos, const Iri& predicate) {
    check_lex(current_);
    Triple t{subject, subject_pos, predicate, Iri{}, current_.pos};
    switch (current_.type) {
      case Tok::IriRef:
      case Tok::PName:
        t.object = resolve(current_);
        advance();
        break;
      case Tok::Number:
      case Tok::Boolean:
        t.object = Literal{current_.text, current_.type, std::nullopt};
        advance();
        break;
      case Tok::String: {
        Literal lit{current_.text, Tok::String, std::nullopt};
        advance();
        check_lex(current_);
        if (current_.type == Tok::LangTag) fail(current_, "language tags are not supported");
        if (current_.type == Tok::Caret2) {
          advance();
          lit.datatype = iri_term("datatype").value;
        }
        t.object = std::move(lit);
        break;
      }
      default:
        fail(current_, "expected object (IRI or literal)");
    }
    triples.push_back(std::move(t));
  }

  Lexer lexer_;
  Token current_;
  std::map<std::string, std::string> prefixes_;
};

// ---------------------------------------------------------------------------
// Semantic phase: turn triples into typed nodes, edges and attributes.

struct AttrObservation {
  AttrValue value;
  bool set_member = false;
  SourcePos pos;
};

struct NodeInfo {
  std::optional<NodeKind> kind;
  SourcePos kind_pos;
  std::optional<std::string> label;
  std::map<std::string, std::vector<AttrObservation>> attrs;
  SourcePos first_pos;
};

const std::regex& integer_re() {
  static const std::regex re(R"([+-]?[0-9]+)");
  return re;
}
const std::regex& decimal_re() {
  static const std::regex re(R"([+-]?([0-9]+|[0-9]*\.[0-9]+))");
  return re;
}

std::string xsd(std::string_view local) { return std::string(kXsdNamespace) + std::string(local); }
std::string ppr_iri(std::string_view local) { return std::string(kPprNamespace) + std::string(local); }

class Builder {
 public:
  Builder(std::vector<ParseError>& errors, SourcePos eof) : errors_(errors), eof_(eof) {}

  void add(const Triple& t) {
    NodeInfo& subject = touch(t.subject, t.subject_pos);
    const std::string& p = t.predicate.value;

    if (p == std::string(kRdfNamespace) + "type") {
      const Iri* cls = std::get_if<Iri>(&t.object);
      if (!cls) return error(t.object_pos, "literal type mismatch: rdf:type needs a class IRI");
      std::optional<NodeKind> kind;
      if (cls->value.starts_with(kPprNamespace)) {
        kind = node_kind_from_string(std::string_view(cls->value).substr(kPprNamespace.size()));
      }
      if (!kind) return error(t.object_pos, fmt::format("unknown class <{}>", cls->value));
      if (subject.kind && *subject.kind != *kind) {
        return error(t.object_pos,
                     fmt::format("<{}> declared as both {} and {}", t.subject.value,
                                 to_string(*subject.kind), to_string(*kind)));
      }
      subject.kind = kind;
      subject.kind_pos = t.object_pos;
      return;
    }

    if (p == std::string(kRdfsNamespace) + "label") {
      const Literal* lit = std::get_if<Literal>(&t.object);
      if (!lit || lit->lexical_type != Tok::String ||
          (lit->datatype && *lit->datatype != xsd("string"))) {
        return error(t.object_pos, "literal type mismatch: rdfs:label needs a string");
      }
      if (subject.label && *subject.label != lit->text) {
        return error(t.object_pos, fmt::format("<{}> has more than one label", t.subject.value));
      }
      subject.label = lit->text;
      return;
    }

    if (p.starts_with(kPprNamespace)) {
      if (auto kind = edge_kind_from_string(std::string_view(p).substr(kPprNamespace.size()))) {
        const Iri* object = std::get_if<Iri>(&t.object);
        if (!object) {
          return error(t.object_pos,
                       fmt::format("literal type mismatch: ppr:{} needs an IRI object",
                                   to_string(*kind)));
        }
        touch(*object, t.object_pos);
        Edge edge{t.subject, *kind, *object};
        edges_.try_emplace(edge, t.object_pos);
        return;
      }
    }

    std::string name = p;
    if (p.starts_with(kPprNamespace)) {
      auto local = std::string_view(p).substr(kPprNamespace.size());
      if (!is_identifier(local)) {
        return error(t.object_pos, fmt::format("invalid attribute predicate <{}>", p));
      }
      name = std::string(local);
    }
    AttrObservation obs;
    obs.pos = t.object_pos;
    if (const Iri* iri = std::get_if<Iri>(&t.object)) {
      obs.value = AttrValue::iri(iri->value);
    } else {
      auto converted = convert_literal(std::get<Literal>(t.object), t.object_pos);
      if (!converted) return;
      obs = std::move(*converted);
    }
    subject.attrs[name].push_back(std::move(obs));
  }

  GraphDelta finish() {
    infer_kinds();
    GraphDelta delta;
    for (auto& [iri, info] : nodes_) {
      if (!info.kind) {
        error(eof_, fmt::format("cannot determine the kind of <{}> (first used at line {}); "
                                "declare it with `a ppr:<Kind>`",
                                iri.value, info.first_pos.line));
        continue;
      }
      NodeDecl decl{iri, *info.kind, info.label.value_or(""), {}, info.kind_pos};
      for (auto& [name, observations] : info.attrs) {
        if (auto value = build_attr(name, observations)) {
          try {
            check_attribute(*info.kind, name, *value);
            decl.attrs.emplace(name, std::move(*value));
          } catch (const Error& e) {
            error(observations.back().pos, e.what());
          }
        }
      }
      delta.nodes.push_back(std::move(decl));
    }
    for (const auto& [edge, pos] : edges_) {
      const NodeInfo& s = nodes_.at(edge.subject);
      const NodeInfo& o = nodes_.at(edge.object);
      if (!s.kind || !o.kind) continue;
      if (!edge_permitted(*s.kind, edge.kind, *o.kind)) {
        SourcePos at = std::max({pos, s.kind_pos, o.kind_pos});
        error(at, fmt::format("ppr:{} is not permitted from {} <{}> to {} <{}>",
                              to_string(edge.kind), to_string(*s.kind), edge.subject.value,
                              to_string(*o.kind), edge.object.value));
        continue;
      }
      delta.edges.push_back({edge, pos});
    }
    return delta;
  }

 private:
  NodeInfo& touch(const Iri& iri, SourcePos pos) {
    auto [it, inserted] = nodes_.try_emplace(iri);
    if (inserted) it->second.first_pos = pos;
    return it->second;
  }

  void error(SourcePos pos, std::string message) {
    errors_.push_back({pos.line, pos.column, std::move(message), {}});
  }

  std::optional<AttrObservation> convert_literal(const Literal& lit, SourcePos pos) {
    AttrObservation obs;
    obs.pos = pos;
    if (lit.lexical_type == Tok::Number) {
      try {
        obs.value = AttrValue::number_lexical(lit.text);
      } catch (const Error& e) {
        error(pos, e.what());
        return std::nullopt;
      }
      return obs;
    }
    if (lit.lexical_type == Tok::Boolean) {
      obs.value = AttrValue::boolean(lit.text == "true");
      return obs;
    }
    if (!lit.datatype || *lit.datatype == xsd("string")) {
      obs.value = AttrValue::text(lit.text);
      return obs;
    }
    const std::string& dt = *lit.datatype;
    auto mismatch = [&](std::string_view type) -> std::optional<AttrObservation> {
      error(pos, fmt::format("literal type mismatch: '{}' is not a valid {}", lit.text, type));
      return std::nullopt;
    };
    if (dt == xsd("integer") || dt == xsd("decimal") || dt == xsd("double")) {
      bool shape_ok = dt == xsd("integer")   ? std::regex_match(lit.text, integer_re())
                      : dt == xsd("decimal") ? std::regex_match(lit.text, decimal_re())
                                             : true;
      try {
        if (!shape_ok) throw Error(ErrorCode::InvalidAttr, "shape");
        obs.value = AttrValue::number_lexical(lit.text);
      } catch (const Error&) {
        return mismatch(fmt::format("xsd:{}", dt.substr(kXsdNamespace.size())));
      }
    } else if (dt == xsd("boolean")) {
      if (lit.text != "true" && lit.text != "false") return mismatch("xsd:boolean");
      obs.value = AttrValue::boolean(lit.text == "true");
    } else if (dt == ppr_iri("member")) {
      obs.value = AttrValue::text(lit.text);
      obs.set_member = true;
    } else {
      error(pos, fmt::format("unsupported datatype <{}>", dt));
      return std::nullopt;
    }
    return obs;
  }

  std::optional<AttrValue> build_attr(const std::string& name,
                                      std::vector<AttrObservation>& observations) {
    // Drop repeated identical values (RDF set semantics).
    std::vector<AttrObservation> unique;
    for (auto& obs : observations) {
      bool dup = std::any_of(unique.begin(), unique.end(), [&](const AttrObservation& u) {
        return u.value == obs.value && u.set_member == obs.set_member;
      });
      if (!dup) unique.push_back(std::move(obs));
    }
    observations = std::move(unique);

    bool as_set = name == std::string(kAttrConstraint) || observations.size() > 1 ||
                  std::any_of(observations.begin(), observations.end(),
                              [](const AttrObservation& o) { return o.set_member; });
    if (!as_set) return observations.front().value;

    AttrValue::TextSet members;
    for (const auto& obs : observations) {
      if (obs.value.type() != AttrValue::Type::Text) {
        error(obs.pos, fmt::format("literal type mismatch: attribute '{}' has several values, "
                                   "which must all be strings",
                                   name));
        return std::nullopt;
      }
      members.insert(obs.value.as_text());
    }
    return AttrValue::set(std::move(members));
  }

  void infer_kinds() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [edge, pos] : edges_) {
        NodeInfo& s = nodes_.at(edge.subject);
        NodeInfo& o = nodes_.at(edge.object);
        if (s.kind && o.kind) continue;
        std::set<NodeKind> subject_kinds;
        std::set<NodeKind> object_kinds;
        for (const auto& [sk, ok] : permitted_pairs(edge.kind)) {
          if ((!s.kind || *s.kind == sk) && (!o.kind || *o.kind == ok)) {
            subject_kinds.insert(sk);
            object_kinds.insert(ok);
          }
        }
        if (!s.kind && subject_kinds.size() == 1) {
          s.kind = *subject_kinds.begin();
          s.kind_pos = pos;
          changed = true;
        }
        if (!o.kind && object_kinds.size() == 1) {
          o.kind = *object_kinds.begin();
          o.kind_pos = pos;
          changed = true;
        }
      }
    }
  }

  std::vector<ParseError>& errors_;
  SourcePos eof_;
  std::map<Iri, NodeInfo> nodes_;
  std::map<Edge, SourcePos> edges_;
};

std::string line_text(std::string_view text, int line) {
  std::size_t start = 0;
  for (int l = 1; l < line && start != std::string_view::npos; ++l) {
    start = text.find('\n', start);
    if (start != std::string_view::npos) ++start;
  }
  if (start == std::string_view::npos || start > text.size()) return {};
  auto end = text.find('\n', start);
  std::string s(text.substr(start, end == std::string_view::npos ? end : end - start));
  if (s.size() > 120) s = s.substr(0, 117) + "...";
  return s;
}

}  // namespace

std::string format_error(const ParseError& error) {
  std::string out = fmt::format("{}:{}: {}", error.line, error.column, error.message);
  if (!error.snippet.empty()) {
    out += fmt::format("\n    {}\n    {}^", error.snippet,
                       std::string(static_cast<std::size_t>(std::max(0, error.column - 1)), ' '));
  }
  return out;
}

ParseResult parse_turtle(std::string_view text) {
  ParseResult result;
  Parser parser(text);
  parser.run();
  result.errors = std::move(parser.errors_);

  Builder builder(result.errors, parser.end_pos());
  for (const auto& t : parser.triples) builder.add(t);
  result.delta = builder.finish();
  result.delta.prefixes = std::move(parser.declared);

  std::stable_sort(result.errors.begin(), result.errors.end(),
                   [](const ParseError& a, const ParseError& b) {
                     return std::tie(a.line, a.column) < std::tie(b.line, b.column);
                   });
  for (auto& e : result.errors) e.snippet = line_text(text, e.line);
  return result;
}

void apply_delta(AkgGraph& graph, const GraphDelta& delta, CycleCheck check) {
  for (const auto& [prefix, base] : delta.prefixes) graph.set_prefix(prefix, base);
  for (const auto& n : delta.nodes) graph.add_node(n.iri, n.kind, n.label, n.attrs);
  for (const auto& e : delta.edges) {
    graph.add_edge(e.edge.subject, e.edge.kind, e.edge.object, check);
  }
}

LoadResult load_turtle(std::string_view text, CycleCheck check) {
  LoadResult result;
  auto parsed = parse_turtle(text);
  if (!parsed.ok()) {
    result.errors = std::move(parsed.errors);
    return result;
  }
  AkgGraph graph;
  for (const auto& [prefix, base] : parsed.delta.prefixes) {
    try {
      graph.set_prefix(prefix, base);
    } catch (const Error& e) {
      result.errors.push_back({1, 1, e.what(), line_text(text, 1)});
      return result;
    }
  }
  for (const auto& n : parsed.delta.nodes) graph.add_node(n.iri, n.kind, n.label, n.attrs);
  for (const auto& e : parsed.delta.edges) {
    try {
      graph.add_edge(e.edge.subject, e.edge.kind, e.edge.object, check);
    } catch (const Error& err) {
      result.errors.push_back(
          {e.pos.line, e.pos.column, err.what(), line_text(text, e.pos.line)});
    }
  }
  if (result.errors.empty()) result.graph = std::move(graph);
  return result;
}

}  // namespace ppr::ttl
