#include "tamc/parser.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace tamc {

std::string ParseDiagnostic::str() const {
  std::ostringstream out;
  out << span.file << ":" << span.line << ":" << span.column << ": "
      << (severity == Severity::Error ? "error: " : "warning: ") << message;
  return out.str();
}

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

struct Abort {};

class Lexer {
 public:
  Lexer(const std::string& src, const std::string& file, std::vector<ParseDiagnostic>& diags)
      : src_(src), file_(file), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws_and_comments();
      if (pos_ >= src_.size()) break;
      int line = line_, col = col_;
      char c = src_[pos_];
      if (std::isalpha((unsigned char)c) || c == '_') {
        std::string id;
        while (pos_ < src_.size() &&
               (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
          id += advance();
        out.push_back({Token::Kind::Ident, id, 0, line, col});
      } else if (std::isdigit((unsigned char)c)) {
        std::string num;
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) num += advance();
        std::int64_t v = 0;
        try {
          v = std::stoll(num);
        } catch (const std::exception&) {
          error(line, col, (int)num.size(), "integer literal out of range");
        }
        out.push_back({Token::Kind::Int, num, v, line, col});
      } else {
        static const char* two_char[] = {"->", ":=", "==", "!=", ">=", "<=", "&&", "||"};
        std::string p(1, c);
        if (pos_ + 1 < src_.size()) {
          std::string pair = p + src_[pos_ + 1];
          for (const char* t : two_char)
            if (pair == t) {
              p = pair;
              break;
            }
        }
        static const std::string single = "{}()[];:,'+-*<>!=";
        if (p.size() == 1 && single.find(c) == std::string::npos)
          error(line, col, 1, std::string("unexpected character '") + c + "'");
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        out.push_back({Token::Kind::Punct, p, 0, line, col});
      }
    }
    out.push_back({Token::Kind::End, "<end of file>", 0, line_, col_});
    return out;
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace((unsigned char)c)) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        bool closed = false;
        while (pos_ < src_.size()) {
          if (src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
            advance();
            advance();
            closed = true;
            break;
          }
          advance();
        }
        if (!closed) error(line, col, 2, "unterminated comment");
      } else {
        break;
      }
    }
  }

  [[noreturn]] void error(int line, int col, int len, std::string msg) {
    diags_.push_back({Severity::Error, std::move(msg), {file_, line, col, len}});
    throw Abort{};
  }

  const std::string& src_;
  const std::string& file_;
  std::vector<ParseDiagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Linear combination over typed symbols, built while parsing arithmetic.
struct Combo {
  Rational constant;
  std::map<std::pair<int, int>, Rational> terms;  // (SymKind, index) -> coeff

  static Combo lit(Rational c) {
    Combo r;
    r.constant = c;
    return r;
  }
  static Combo sym(SymKind k, int idx) {
    Combo r;
    r.terms[{(int)k, idx}] = Rational(1);
    return r;
  }

  bool is_constant() const { return terms.empty(); }

  bool references(SymKind k) const {
    for (const auto& [key, coeff] : terms) {
      (void)coeff;
      if (key.first == (int)k) return true;
    }
    return false;
  }

  // The lone symbol when the combo is exactly 1 * sym.
  std::optional<std::pair<SymKind, int>> lone_symbol() const {
    if (!constant.is_zero() || terms.size() != 1) return std::nullopt;
    const auto& [key, coeff] = *terms.begin();
    if (coeff != Rational(1)) return std::nullopt;
    return std::make_pair((SymKind)key.first, key.second);
  }

  Combo operator+(const Combo& o) const {
    Combo r = *this;
    r.constant = r.constant + o.constant;
    for (const auto& [key, coeff] : o.terms) {
      Rational c = (r.terms.count(key) ? r.terms[key] : Rational(0)) + coeff;
      if (c.is_zero())
        r.terms.erase(key);
      else
        r.terms[key] = c;
    }
    return r;
  }
  Combo operator-(const Combo& o) const { return *this + (o * Rational(-1)); }
  Combo operator*(const Rational& k) const {
    Combo r;
    r.constant = constant * k;
    if (k.is_zero()) return r;
    for (const auto& [key, coeff] : terms) r.terms[key] = coeff * k;
    return r;
  }

  LinearExpr to_param_expr() const {
    LinearExpr e;
    e.set_constant(constant);
    for (const auto& [key, coeff] : terms) e.set_coeff(key.second, coeff);
    return e;
  }
};

enum class RelOp { Lt, Le, Gt, Ge, Eq, Ne };

RelOp negate_rel(RelOp r) {
  switch (r) {
    case RelOp::Lt: return RelOp::Ge;
    case RelOp::Le: return RelOp::Gt;
    case RelOp::Gt: return RelOp::Le;
    case RelOp::Ge: return RelOp::Lt;
    case RelOp::Eq: return RelOp::Ne;
    case RelOp::Ne: return RelOp::Eq;
  }
  return r;
}

RelOp mirror_rel(RelOp r) {
  switch (r) {
    case RelOp::Lt: return RelOp::Gt;
    case RelOp::Le: return RelOp::Ge;
    case RelOp::Gt: return RelOp::Lt;
    case RelOp::Ge: return RelOp::Le;
    default: return r;
  }
}

// Parser-internal expression node; spans anchor diagnostics.
struct ENode {
  enum class K { Combo, True, False, Not, And, Or, Implies, Box, Cmp };
  K k = K::True;
  Combo combo;            // K::Combo
  Combo lhs, rhs;         // K::Cmp
  RelOp rel = RelOp::Eq;  // K::Cmp
  std::vector<ENode> kids;
  Token tok;
};

class Parser {
 public:
  Parser(const std::string& src, std::string origin)
      : src_(src), origin_(std::move(origin)) {}

  ParseResult run() try {
    Lexer lex(src_, origin_, result_.diagnostics);
    tokens_ = lex.run();
    parse_file_body();
    finalize();
    return std::move(result_);
  } catch (const Abort&) {
    result_.automaton.reset();
    return std::move(result_);
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  SourceSpan span_of(const Token& t) const {
    return {origin_, t.line, t.col, (int)t.text.size()};
  }

  [[noreturn]] void fail(const Token& t, std::string msg) {
    result_.diagnostics.push_back({Severity::Error, std::move(msg), span_of(t)});
    throw Abort{};
  }
  void warn(const Token& t, std::string msg) {
    result_.diagnostics.push_back({Severity::Warning, std::move(msg), span_of(t)});
  }

  bool at_punct(const char* p) const {
    return peek().kind == Token::Kind::Punct && peek().text == p;
  }
  bool accept_punct(const char* p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }
  Token expect_punct(const char* p, const std::string& what) {
    if (!at_punct(p)) fail(peek(), "expected '" + std::string(p) + "' " + what);
    return next();
  }
  Token expect_ident(const std::string& what) {
    if (peek().kind != Token::Kind::Ident) fail(peek(), "expected identifier " + what);
    return next();
  }
  Token expect_keyword(const char* kw) {
    if (peek().kind != Token::Kind::Ident || peek().text != kw)
      fail(peek(), "expected '" + std::string(kw) + "'");
    return next();
  }
  Token expect_int(const std::string& what) {
    if (peek().kind != Token::Kind::Int) fail(peek(), "expected integer " + what);
    return next();
  }

  // ---- sections ------------------------------------------------------------

  void parse_file_body() {
    expect_keyword("ta");
    ta_.name = expect_ident("as automaton name").text;
    expect_punct("{", "to open the automaton body");

    static const char* order[] = {"shared",    "parameters", "assumptions", "locations",
                                  "inits",     "rules",      "specifications"};
    int next_section = 0;
    while (!at_punct("}")) {
      Token kw = expect_ident("as section name");
      int idx = -1;
      for (int i = 0; i < 7; ++i)
        if (kw.text == order[i]) idx = i;
      if (idx < 0) fail(kw, "unknown section '" + kw.text + "'");
      if (idx < next_section)
        fail(kw, "section '" + kw.text + "' out of order (expected order: shared, parameters, "
                 "assumptions, locations, inits, rules, specifications)");
      next_section = idx + 1;
      switch (idx) {
        case 0: parse_name_list(ta_.shared, "shared variable"); break;
        case 1: parse_name_list(ta_.params, "parameter"); break;
        case 2: parse_assumptions(kw); break;
        case 3: parse_locations(kw); break;
        case 4: parse_inits(kw); break;
        case 5: parse_rules(kw); break;
        case 6: parse_specifications(kw); break;
      }
    }
    expect_punct("}", "to close the automaton body");
    if (peek().kind != Token::Kind::End) fail(peek(), "trailing input after automaton");
  }

  void parse_name_list(std::vector<std::string>& out, const std::string& what) {
    do {
      Token t = expect_ident("as " + what + " name");
      declare(t, what);
      out.push_back(t.text);
    } while (accept_punct(","));
    expect_punct(";", "after " + what + " list");
  }

  void declare(const Token& t, const std::string& what) {
    if (symbols_.count(t.text)) fail(t, "duplicate identifier '" + t.text + "'");
    symbols_[t.text] = what;
  }

  std::optional<std::int64_t> parse_cardinality() {
    if (!at_punct("(")) return std::nullopt;
    next();
    Token n = expect_int("as section cardinality");
    expect_punct(")", "after section cardinality");
    return n.value;
  }

  void check_cardinality(const Token& section, std::optional<std::int64_t> declared,
                         std::int64_t actual, bool strict) {
    if (!declared || *declared == actual) return;
    std::ostringstream msg;
    msg << "section '" << section.text << "' declares " << *declared << " entries but contains "
        << actual;
    if (strict)
      fail(section, msg.str());
    else
      warn(section, msg.str());
  }

  void parse_assumptions(const Token& kw) {
    auto card = parse_cardinality();
    expect_punct("{", "to open assumptions");
    std::int64_t count = 0;
    while (!at_punct("}")) {
      Token anchor = peek();
      ENode e = parse_expr();
      expect_punct(";", "after assumption");
      LinearConstraint c = to_constraint(e, anchor);
      if (c.references(SymKind::Loc) || c.references(SymKind::Shared))
        fail(anchor, "assumptions may only reference parameters");
      ta_.resilience.push_back(std::move(c));
      ++count;
    }
    next();
    check_cardinality(kw, card, count, false);
  }

  void parse_locations(const Token& kw) {
    auto card = parse_cardinality();
    expect_punct("{", "to open locations");
    std::vector<std::pair<std::string, std::int64_t>> entries;
    while (!at_punct("}")) {
      Token name = expect_ident("as location name");
      declare(name, "location");
      expect_punct(":", "after location name");
      expect_punct("[", "before location index");
      Token idx = expect_int("as location index");
      expect_punct("]", "after location index");
      expect_punct(";", "after location declaration");
      entries.emplace_back(name.text, idx.value);
      if (idx.value < 0) fail(idx, "location index must be non-negative");
    }
    next();
    check_cardinality(kw, card, (std::int64_t)entries.size(), true);

    // Bracket indices define the canonical location ordering.
    ta_.locations.assign(entries.size(), "");
    for (const auto& [name, idx] : entries) {
      if (idx >= (std::int64_t)entries.size() || !ta_.locations[idx].empty())
        fail(kw, "location indices must form a permutation of 0.." +
                     std::to_string(entries.size() - 1));
      ta_.locations[idx] = name;
    }
  }

  void parse_inits(const Token& kw) {
    auto card = parse_cardinality();
    expect_punct("{", "to open inits");
    std::int64_t count = 0;
    while (!at_punct("}")) {
      Token anchor = peek();
      ENode e = parse_expr();
      expect_punct(";", "after init constraint");
      handle_init_constraint(e, anchor);
      ++count;
    }
    next();
    check_cardinality(kw, card, count, false);
  }

  void handle_init_constraint(const ENode& e, const Token& anchor) {
    LinearConstraint c = to_constraint(e, anchor);
    if (!c.references(SymKind::Loc) && !c.references(SymKind::Param) &&
        c.references(SymKind::Shared)) {
      // Pure shared-variable init: must be consistent with g = 0.
      std::vector<std::int64_t> zeros(
          std::max(ta_.locations.size(), std::max(ta_.shared.size(), ta_.params.size())), 0);
      if (!c.eval(zeros, zeros, zeros))
        fail(anchor, "shared variables are 0 in every initial configuration; this init "
                     "constraint contradicts that");
      return;  // implied by g = 0, dropped
    }
    // Locations pinned to zero are excluded from the initial set.
    if (c.rel == LinearConstraint::Rel::Eq && c.constant.is_zero() && c.terms.size() == 1 &&
        c.terms[0].sym == SymKind::Loc)
      zero_pinned_.insert(c.terms[0].index);
    ta_.init_constraints.push_back(std::move(c));
  }

  void parse_rules(const Token& kw) {
    auto card = parse_cardinality();
    expect_punct("{", "to open rules");
    std::int64_t count = 0;
    while (!at_punct("}")) {
      Token id = expect_int("as rule id");
      if (id.value != count)
        fail(id, "rule ids must be consecutive starting at 0 (expected " +
                     std::to_string(count) + ")");
      expect_punct(":", "after rule id");
      Rule r;
      r.id = (int)id.value;
      r.from = location_ref(expect_ident("as source location"));
      expect_punct("->", "between rule endpoints");
      r.to = location_ref(expect_ident("as target location"));
      expect_keyword("when");
      Token ganchor = expect_punct("(", "to open the rule guard");
      r.guard = to_rule_guard(parse_expr(), ganchor);
      expect_punct(")", "to close the rule guard");
      expect_keyword("do");
      expect_punct("{", "to open the update block");
      r.updates.assign(ta_.shared.size(), 0);
      std::set<int> written;
      while (!at_punct("}")) parse_update(r, written);
      next();
      expect_punct(";", "after rule");
      ta_.rules.push_back(std::move(r));
      ++count;
    }
    next();
    check_cardinality(kw, card, count, true);
  }

  int location_ref(const Token& t) {
    auto idx = ta_.location_index(t.text);
    if (!idx) fail(t, "unknown location '" + t.text + "'");
    return *idx;
  }

  void parse_update(Rule& r, std::set<int>& written) {
    Token var = expect_ident("as updated shared variable");
    auto vi = ta_.shared_index(var.text);
    if (!vi) fail(var, "unknown shared variable '" + var.text + "'");
    if (!written.insert(*vi).second) fail(var, "variable updated twice in one rule");
    expect_punct("'", "after updated variable (primed assignment)");
    expect_punct(":=", "in update");
    if (peek().kind == Token::Kind::Int && peek().value == 0 &&
        !(peek(1).kind == Token::Kind::Punct &&
          (peek(1).text == "+" || peek(1).text == "-" || peek(1).text == "*"))) {
      next();
      r.resets.insert(*vi);
      resets_or_decrements_ = true;
      expect_punct(";", "after update");
      return;
    }
    Token base = expect_ident("as update base variable");
    if (base.text != var.text)
      fail(base, "update must have the form " + var.text + "' := " + var.text +
                     " +/- <constant> or " + var.text + "' := 0");
    std::int64_t delta = 0;
    if (accept_punct("+")) {
      delta = expect_int("as update increment").value;
    } else if (accept_punct("-")) {
      delta = -expect_int("as update decrement").value;
    }
    if (delta < 0) resets_or_decrements_ = true;
    r.updates[*vi] = delta;
    expect_punct(";", "after update");
  }

  void parse_specifications(const Token& kw) {
    auto card = parse_cardinality();
    expect_punct("{", "to open specifications");
    std::int64_t count = 0;
    while (!at_punct("}")) {
      Token name = expect_ident("as specification name");
      for (const auto& s : ta_.specs)
        if (s.name == name.text) fail(name, "duplicate specification '" + name.text + "'");
      expect_punct(":", "after specification name");
      ENode e = parse_expr();
      accept_punct(";");  // trailing semicolon is optional here
      ta_.specs.push_back(build_spec(name.text, e, name));
      ++count;
    }
    next();
    check_cardinality(kw, card, count, true);
  }

  // ---- unified expression grammar ------------------------------------------
  // precedence: -> < || < && < ! < comparisons < +/- < * < unary minus

  ENode parse_expr() { return parse_implies(); }

  ENode parse_implies() {
    ENode lhs = parse_or();
    if (at_punct("->")) {
      Token t = next();
      ENode rhs = parse_implies();
      ENode n;
      n.k = ENode::K::Implies;
      n.tok = t;
      n.kids = {std::move(lhs), std::move(rhs)};
      return n;
    }
    return lhs;
  }

  ENode parse_or() {
    ENode lhs = parse_and();
    while (at_punct("||")) {
      Token t = next();
      ENode rhs = parse_and();
      ENode n;
      n.k = ENode::K::Or;
      n.tok = t;
      n.kids = {std::move(lhs), std::move(rhs)};
      lhs = std::move(n);
    }
    return lhs;
  }

  ENode parse_and() {
    ENode lhs = parse_unary_bool();
    while (at_punct("&&")) {
      Token t = next();
      ENode rhs = parse_unary_bool();
      ENode n;
      n.k = ENode::K::And;
      n.tok = t;
      n.kids = {std::move(lhs), std::move(rhs)};
      lhs = std::move(n);
    }
    return lhs;
  }

  ENode parse_unary_bool() {
    if (at_punct("!")) {
      Token t = next();
      ENode n;
      n.k = ENode::K::Not;
      n.tok = t;
      n.kids = {parse_unary_bool()};
      return n;
    }
    if (at_punct("[")) {
      Token t = next();
      expect_punct("]", "to complete the globally operator '[]'");
      ENode n;
      n.k = ENode::K::Box;
      n.tok = t;
      n.kids = {parse_unary_bool()};
      return n;
    }
    return parse_comparison();
  }

  ENode parse_comparison() {
    ENode lhs = parse_primary_or_arith();
    static const char* rels[] = {"<", "<=", ">", ">=", "==", "!="};
    for (const char* r : rels) {
      if (at_punct(r)) {
        Token t = next();
        ENode rhs = parse_primary_or_arith();
        if (lhs.k != ENode::K::Combo) fail(t, "left side of comparison is not arithmetic");
        if (rhs.k != ENode::K::Combo) fail(t, "right side of comparison is not arithmetic");
        ENode n;
        n.k = ENode::K::Cmp;
        n.tok = t;
        n.lhs = lhs.combo;
        n.rhs = rhs.combo;
        if (t.text == "<") n.rel = RelOp::Lt;
        else if (t.text == "<=") n.rel = RelOp::Le;
        else if (t.text == ">") n.rel = RelOp::Gt;
        else if (t.text == ">=") n.rel = RelOp::Ge;
        else if (t.text == "==") n.rel = RelOp::Eq;
        else n.rel = RelOp::Ne;
        return n;
      }
    }
    return lhs;
  }

  ENode parse_primary_or_arith() {
    ENode lhs = parse_term();
    while (at_punct("+") || at_punct("-")) {
      bool plus = at_punct("+");
      Token t = next();
      ENode rhs = parse_term();
      require_combo(lhs, t);
      require_combo(rhs, t);
      lhs.combo = plus ? lhs.combo + rhs.combo : lhs.combo - rhs.combo;
    }
    return lhs;
  }

  ENode parse_term() {
    ENode lhs = parse_factor();
    while (at_punct("*")) {
      Token t = next();
      ENode rhs = parse_factor();
      require_combo(lhs, t);
      require_combo(rhs, t);
      if (!lhs.combo.is_constant() && !rhs.combo.is_constant())
        fail(t, "nonlinear term: both factors reference variables");
      if (lhs.combo.is_constant())
        lhs.combo = rhs.combo * lhs.combo.constant;
      else
        lhs.combo = lhs.combo * rhs.combo.constant;
    }
    return lhs;
  }

  void require_combo(const ENode& n, const Token& t) {
    if (n.k != ENode::K::Combo) fail(t, "expected an arithmetic operand");
  }

  ENode parse_factor() {
    Token t = peek();
    if (accept_punct("-")) {
      ENode n = parse_factor();
      require_combo(n, t);
      n.combo = n.combo * Rational(-1);
      return n;
    }
    if (accept_punct("(")) {
      ENode inner = parse_expr();
      expect_punct(")", "to close parenthesized expression");
      return inner;
    }
    if (t.kind == Token::Kind::Int) {
      next();
      ENode n;
      n.k = ENode::K::Combo;
      n.tok = t;
      n.combo = Combo::lit(Rational(t.value));
      return n;
    }
    if (t.kind == Token::Kind::Ident) {
      next();
      ENode n;
      n.tok = t;
      if (t.text == "true") {
        n.k = ENode::K::True;
        return n;
      }
      if (t.text == "false") {
        n.k = ENode::K::False;
        return n;
      }
      n.k = ENode::K::Combo;
      if (auto i = ta_.location_index(t.text)) {
        n.combo = Combo::sym(SymKind::Loc, *i);
      } else if (auto s = ta_.shared_index(t.text)) {
        n.combo = Combo::sym(SymKind::Shared, *s);
      } else if (auto p = ta_.param_index(t.text)) {
        n.combo = Combo::sym(SymKind::Param, *p);
      } else {
        fail(t, "unknown identifier '" + t.text + "'");
      }
      return n;
    }
    fail(t, "expected an expression");
  }

  // ---- conversions ----------------------------------------------------------

  // lhs REL rhs  ->  normalized linear constraint (Eq or Ge against 0).
  LinearConstraint to_constraint(const ENode& e, const Token& anchor) {
    if (e.k != ENode::K::Cmp) fail(anchor, "expected a linear comparison");
    Combo diff = e.lhs - e.rhs;  // diff REL 0
    RelOp rel = e.rel;
    if (rel == RelOp::Lt || rel == RelOp::Le) {
      diff = diff * Rational(-1);
      rel = rel == RelOp::Lt ? RelOp::Gt : RelOp::Ge;
    }
    if (rel == RelOp::Ne) fail(anchor, "'!=' is not allowed in linear constraints");

    // Clear denominators so strictness can be absorbed into the constant.
    std::int64_t scale = 1;
    {
      std::int64_t l = diff.constant.den();
      for (const auto& [key, coeff] : diff.terms) {
        (void)key;
        l = std::lcm(l, coeff.den());
      }
      scale = l;
    }
    diff = diff * Rational(scale);
    if (rel == RelOp::Gt) {
      diff.constant = diff.constant - Rational(1);
      rel = RelOp::Ge;
    }
    LinearConstraint c;
    c.constant = diff.constant;
    c.rel = rel == RelOp::Eq ? LinearConstraint::Rel::Eq : LinearConstraint::Rel::Ge;
    for (const auto& [key, coeff] : diff.terms)
      c.terms.push_back({(SymKind)key.first, key.second, coeff});
    return c;
  }

  // Desugars a comparison over one shared variable into guard atoms.
  GuardFormula cmp_to_guard(const ENode& e) {
    const Token& t = e.tok;
    Combo var_side = e.lhs, thr_side = e.rhs;
    RelOp rel = e.rel;
    if (!var_side.lone_symbol() || var_side.lone_symbol()->first != SymKind::Shared) {
      std::swap(var_side, thr_side);
      rel = mirror_rel(rel);
    }
    auto lone = var_side.lone_symbol();
    if (!lone || lone->first != SymKind::Shared)
      fail(t, "a guard comparison must have a shared variable on one side");
    if (thr_side.references(SymKind::Shared) || thr_side.references(SymKind::Loc))
      fail(t, "a guard threshold may only reference parameters and constants");
    int var = lone->second;
    LinearExpr thr = thr_side.to_param_expr();
    LinearExpr one{Rational(1)};

    auto atom = [&](GuardKind k, LinearExpr x) {
      return GuardFormula::make_atom({k, std::move(x), var});
    };
    switch (rel) {
      case RelOp::Ge: return atom(GuardKind::Lower, thr);            // x >= e
      case RelOp::Gt: return atom(GuardKind::Lower, thr + one);      // x > e
      case RelOp::Lt: return atom(GuardKind::Upper, thr);            // x < e
      case RelOp::Le: return atom(GuardKind::Upper, thr + one);      // x <= e
      case RelOp::Eq:
        if (thr.is_constant() && thr.constant().is_zero())
          return atom(GuardKind::Upper, one);  // x == 0  ~>  1 > x
        return GuardFormula::make_and(
            {atom(GuardKind::Lower, thr), atom(GuardKind::Upper, thr + one)});
      case RelOp::Ne: {
        GuardFormula eq = cmp_to_guard_eq(thr, var);
        return eq.negated();
      }
    }
    fail(t, "unsupported guard comparison");
  }

  GuardFormula cmp_to_guard_eq(const LinearExpr& thr, int var) {
    LinearExpr one{Rational(1)};
    if (thr.is_constant() && thr.constant().is_zero())
      return GuardFormula::make_atom({GuardKind::Upper, one, var});
    return GuardFormula::make_and({GuardFormula::make_atom({GuardKind::Lower, thr, var}),
                                   GuardFormula::make_atom({GuardKind::Upper, thr + one, var})});
  }

  Guard to_rule_guard(const ENode& e, const Token& anchor) {
    Guard g;
    collect_rule_guard(e, anchor, g);
    return g;
  }

  void collect_rule_guard(const ENode& e, const Token& anchor, Guard& g) {
    switch (e.k) {
      case ENode::K::True: return;
      case ENode::K::And:
        collect_rule_guard(e.kids[0], anchor, g);
        collect_rule_guard(e.kids[1], anchor, g);
        return;
      case ENode::K::Cmp: {
        GuardFormula f = cmp_to_guard(e);
        append_conjuncts(f, e.tok, g);
        return;
      }
      default:
        fail(e.tok.kind == Token::Kind::End ? anchor : e.tok,
             "a rule guard must be a conjunction of threshold comparisons (or 'true')");
    }
  }

  void append_conjuncts(const GuardFormula& f, const Token& t, Guard& g) {
    switch (f.op) {
      case GuardFormula::Op::True: return;
      case GuardFormula::Op::Atom: g.conjuncts.push_back(f.atom); return;
      case GuardFormula::Op::And:
        for (const auto& c : f.children) append_conjuncts(c, t, g);
        return;
      default: fail(t, "this comparison does not desugar to a conjunction of guards");
    }
  }

  // ---- specification normalization -----------------------------------------

  // NNF tree over count atoms and guard formulas.
  struct PTree {
    enum class K { True, False, And, Or, Count, Guard };
    K k = K::True;
    CountAtom count;
    GuardFormula guard;
    std::vector<PTree> kids;
  };

  CountAtom count_atom(const ENode& e, RelOp rel, int loc, std::int64_t bound) {
    const Token& t = e.tok;
    if (bound < 0) fail(t, "count comparisons require a non-negative constant");
    switch (rel) {
      case RelOp::Gt: return {CountAtom::Kind::Ge, loc, bound + 1};
      case RelOp::Ge:
        if (bound == 0) fail(t, "count lower bounds must be at least 1");
        return {CountAtom::Kind::Ge, loc, bound};
      case RelOp::Eq:
        if (bound != 0) fail(t, "count equalities other than '== 0' are not supported");
        return {CountAtom::Kind::Eq0, loc, 1};
      case RelOp::Ne:
        if (bound != 0) fail(t, "count disequalities other than '!= 0' are not supported");
        return {CountAtom::Kind::Ge, loc, 1};
      case RelOp::Lt:
        if (bound == 0) fail(t, "a count cannot be negative");
        if (bound == 1) return {CountAtom::Kind::Eq0, loc, 1};
        return {CountAtom::Kind::Le, loc, bound - 1};
      case RelOp::Le:
        if (bound == 0) return {CountAtom::Kind::Eq0, loc, 1};
        return {CountAtom::Kind::Le, loc, bound};
    }
    fail(t, "unsupported count comparison");
  }

  PTree nnf(const ENode& e, bool neg) {
    PTree out;
    switch (e.k) {
      case ENode::K::True: out.k = neg ? PTree::K::False : PTree::K::True; return out;
      case ENode::K::False: out.k = neg ? PTree::K::True : PTree::K::False; return out;
      case ENode::K::Not: return nnf(e.kids[0], !neg);
      case ENode::K::And:
      case ENode::K::Or: {
        bool is_and = (e.k == ENode::K::And) != neg;
        out.k = is_and ? PTree::K::And : PTree::K::Or;
        out.kids = {nnf(e.kids[0], neg), nnf(e.kids[1], neg)};
        return out;
      }
      case ENode::K::Box: fail(e.tok, "'[]' may not appear below boolean connectives here");
      case ENode::K::Implies: fail(e.tok, "'->' may only appear at the top of a specification");
      case ENode::K::Cmp: {
        Combo l = e.lhs, r = e.rhs;
        RelOp rel = neg ? negate_rel(e.rel) : e.rel;
        // Location atom: lone location on one side, constant on the other.
        Combo var_side = l, other = r;
        RelOp rr = rel;
        if (!var_side.lone_symbol() || var_side.lone_symbol()->first != SymKind::Loc) {
          std::swap(var_side, other);
          rr = mirror_rel(rr);
        }
        auto lone = var_side.lone_symbol();
        if (lone && lone->first == SymKind::Loc) {
          if (!other.is_constant() || !other.constant.is_integer())
            fail(e.tok, "count atoms compare a location against an integer constant");
          out.k = PTree::K::Count;
          out.count = count_atom(e, rr, lone->second, other.constant.num());
          return out;
        }
        // Otherwise it must be a shared-variable guard atom.
        ENode pos = e;
        out.k = PTree::K::Guard;
        out.guard = cmp_to_guard(pos);
        if (neg) out.guard = out.guard.negated();
        return out;
      }
      case ENode::K::Combo: fail(e.tok, "expected a comparison, found a bare expression");
    }
    fail(e.tok, "malformed specification formula");
  }

  bool pure_count(const PTree& t) {
    switch (t.k) {
      case PTree::K::Guard: return false;
      case PTree::K::And:
      case PTree::K::Or:
        return pure_count(t.kids[0]) && pure_count(t.kids[1]);
      default: return true;
    }
  }
  bool pure_guard(const PTree& t) {
    switch (t.k) {
      case PTree::K::Count: return false;
      case PTree::K::And:
      case PTree::K::Or:
        return pure_guard(t.kids[0]) && pure_guard(t.kids[1]);
      default: return true;
    }
  }

  CountFormula to_count_formula(const PTree& t, const Token& anchor) {
    switch (t.k) {
      case PTree::K::True: return CountFormula::make_true();
      case PTree::K::False: return CountFormula::make_false();
      case PTree::K::Count: return CountFormula::make_atom(t.count);
      case PTree::K::And:
        return CountFormula::make_and(
            {to_count_formula(t.kids[0], anchor), to_count_formula(t.kids[1], anchor)});
      case PTree::K::Or:
        return CountFormula::make_or(
            {to_count_formula(t.kids[0], anchor), to_count_formula(t.kids[1], anchor)});
      case PTree::K::Guard: fail(anchor, "guard atom where a count formula is required");
    }
    fail(anchor, "malformed count formula");
  }

  GuardFormula to_guard_formula(const PTree& t, const Token& anchor) {
    switch (t.k) {
      case PTree::K::True: return GuardFormula::make_true();
      case PTree::K::False: return GuardFormula::make_false();
      case PTree::K::Guard: return t.guard;
      case PTree::K::And:
        return GuardFormula::make_and(
            {to_guard_formula(t.kids[0], anchor), to_guard_formula(t.kids[1], anchor)});
      case PTree::K::Or:
        return GuardFormula::make_or(
            {to_guard_formula(t.kids[0], anchor), to_guard_formula(t.kids[1], anchor)});
      case PTree::K::Count: fail(anchor, "count atom where a guard formula is required");
    }
    fail(anchor, "malformed guard formula");
  }

  void require_body_atoms(const CountFormula& f, const Token& anchor) {
    if (f.op == CountFormula::Op::Atom && f.atom.kind == CountAtom::Kind::Le)
      fail(anchor, "not expressible in the specification grammar: only lower bounds "
                   "(count >= c) and emptiness (count == 0) are supported");
    for (const auto& c : f.children) require_body_atoms(c, anchor);
  }

  Pform normalize_pform(const ENode& e, const Token& anchor) {
    PTree t = nnf(e, false);
    Pform p;
    if (pure_count(t)) {
      p.cform = to_count_formula(t, anchor);
    } else if (pure_guard(t)) {
      p.gform = to_guard_formula(t, anchor);
      p.cform = CountFormula::make_false();
    } else if (t.k == PTree::K::Or) {
      // Split a top-level disjunction into its guard-pure and count-pure parts.
      std::vector<PTree> disjuncts;
      flatten_or(std::move(t), disjuncts);
      std::vector<GuardFormula> gs;
      std::vector<CountFormula> cs;
      for (auto& d : disjuncts) {
        if (pure_guard(d))
          gs.push_back(to_guard_formula(d, anchor));
        else if (pure_count(d))
          cs.push_back(to_count_formula(d, anchor));
        else
          fail(anchor, "cannot split into (guard formula) || (count formula): a disjunct "
                       "mixes guard and count atoms");
      }
      if (!gs.empty())
        p.gform = gs.size() == 1 ? gs[0] : GuardFormula::make_or(std::move(gs));
      p.cform = cs.empty()   ? CountFormula::make_false()
                : cs.size() == 1 ? cs[0]
                                 : CountFormula::make_or(std::move(cs));
    } else {
      fail(anchor, "cannot normalize into the specification grammar (guard and count atoms "
                   "mix under a conjunction)");
    }
    require_body_atoms(p.cform, anchor);
    return p;
  }

  void flatten_or(PTree t, std::vector<PTree>& out) {
    if (t.k == PTree::K::Or) {
      for (auto& k : t.kids) flatten_or(std::move(k), out);
    } else {
      out.push_back(std::move(t));
    }
  }

  void collect_pforms(const ENode& e, bool box_seen, std::vector<Pform>& out,
                      const Token& anchor) {
    switch (e.k) {
      case ENode::K::Box: collect_pforms(e.kids[0], true, out, anchor); return;
      case ENode::K::And:
        // [](X && Y) is equivalent to []X && []Y; conjunctions on the spine
        // always split into separate pforms.
        collect_pforms(e.kids[0], box_seen, out, anchor);
        collect_pforms(e.kids[1], box_seen, out, anchor);
        return;
      default:
        if (!box_seen)
          fail(e.tok.kind == Token::Kind::End ? anchor : e.tok,
               "safety specification must be guarded by the globally operator '[]'");
        out.push_back(normalize_pform(e, anchor));
        return;
    }
  }

  bool contains_box(const ENode& e) {
    if (e.k == ENode::K::Box) return true;
    for (const auto& k : e.kids)
      if (contains_box(k)) return true;
    return false;
  }

  SafetySpec build_spec(const std::string& name, const ENode& e, const Token& anchor) {
    SafetySpec spec;
    spec.name = name;
    const ENode* body = &e;
    if (e.k == ENode::K::Implies) {
      PTree lhs = nnf(e.kids[0], false);
      if (!pure_count(lhs))
        fail(anchor, "the left side of '->' must be a count formula over initial states");
      CountFormula restr = to_count_formula(lhs, anchor);
      require_body_atoms(restr, anchor);
      spec.init_restriction = std::move(restr);
      body = &e.kids[1];
    }
    collect_pforms(*body, false, spec.body, anchor);
    return spec;
  }

  // ---- finalization ----------------------------------------------------------

  void finalize() {
    bool is_eta_ext = origin_.size() >= 4 && origin_.substr(origin_.size() - 4) == ".eta";
    if (is_eta_ext) {
      ta_.kind = AutomatonKind::Eta;
    } else if (resets_or_decrements_) {
      result_.diagnostics.push_back(
          {Severity::Warning,
           "file contains resets or decrements; treating the automaton as an ETA",
           {origin_, 1, 1, 0}});
      ta_.kind = AutomatonKind::Eta;
    } else {
      ta_.kind = AutomatonKind::Mta;
    }

    for (std::size_t l = 0; l < ta_.locations.size(); ++l)
      if (!zero_pinned_.count((int)l)) ta_.initial.push_back((int)l);
    if (ta_.initial.empty() && !ta_.locations.empty())
      fail(tokens_.front(), "every location is pinned to zero initially");

    if (auto msg = ta_.validate())
      fail(tokens_.front(), "invalid automaton: " + *msg);
    result_.automaton = std::move(ta_);
  }

  const std::string& src_;
  std::string origin_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseResult result_;
  ThresholdAutomaton ta_;
  std::map<std::string, std::string> symbols_;
  std::set<int> zero_pinned_;
  bool resets_or_decrements_ = false;
};

}  // namespace

ParseResult parse(const std::string& source, const std::string& origin) {
  return Parser(source, origin).run();
}

ParseResult parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({Severity::Error, "cannot open file", {path, 1, 1, 0}});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

}  // namespace tamc
