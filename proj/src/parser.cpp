#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>

#include "sqlsketch/error.hpp"
#include "sqlsketch/lang.hpp"

namespace sqlsketch {

namespace {

enum class Tok {
  Ident,
  Hole,
  Int,
  Float,
  String,
  Regex,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Eq,
  Lt,
  Le,
  Gt,
  Ge,
  Approx,
  InnerJoin,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier / string contents / hole name
  HoleKind hole_kind = HoleKind::Column;
  Value value;
  std::size_t line = 1;
  std::size_t col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, col_, msg); }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && pos_ < src_.size(); ++k) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (peek() == '-' && peek(1) == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      return;
    }
  }

  std::string quoted() {
    advance();  // opening quote
    std::string out;
    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated string literal");
      char c = peek();
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) fail("unterminated string literal");
        c = peek();
      }
      out += c;
      advance();
    }
  }

  void lex_one(Token& t) {
    char c = peek();
    if (c == '?' && peek(1) == '?') {
      advance(2);
      std::size_t start = pos_;
      while (ident_char(peek())) advance();
      if (pos_ == start) fail("expected a hole name");
      t.text = std::string(src_.substr(start, pos_ - start));
      if (peek() != ':') fail("expected ':table' or ':column' after hole name");
      advance();
      std::size_t ks = pos_;
      while (ident_char(peek())) advance();
      std::string kind(src_.substr(ks, pos_ - ks));
      if (kind == "table") {
        t.hole_kind = HoleKind::Table;
      } else if (kind == "column") {
        t.hole_kind = HoleKind::Column;
      } else {
        fail("unknown hole kind '" + kind + "'");
      }
      t.kind = Tok::Hole;
      return;
    }
    if (c == 'r' && peek(1) == '"') {
      advance();
      t.kind = Tok::Regex;
      t.text = quoted();
      return;
    }
    if (c == '"') {
      t.kind = Tok::String;
      t.text = quoted();
      t.value = t.text;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && (std::isdigit(static_cast<unsigned char>(peek(1))) ||
                                    (peek(1) == '.' && std::isdigit(static_cast<unsigned char>(peek(2))))))) {
      lex_number(t);
      return;
    }
    if (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      lex_number(t);
      return;
    }
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (ident_char(peek()) || (peek() == '.' && ident_start(peek(1)))) advance();
      std::string word(src_.substr(start, pos_ - start));
      if (upper(word) == "INNER") {
        std::size_t save_pos = pos_, save_line = line_, save_col = col_;
        if (peek() == '-') {
          advance();
        } else {
          while (peek() == ' ' || peek() == '\t') advance();
        }
        std::size_t js = pos_;
        while (ident_char(peek())) advance();
        if (upper(src_.substr(js, pos_ - js)) == "JOIN") {
          t.kind = Tok::InnerJoin;
          t.text = "INNER-JOIN";
          return;
        }
        pos_ = save_pos;
        line_ = save_line;
        col_ = save_col;
      }
      t.kind = Tok::Ident;
      t.text = std::move(word);
      return;
    }
    switch (c) {
      case '(': t.kind = Tok::LParen; advance(); return;
      case ')': t.kind = Tok::RParen; advance(); return;
      case '{': t.kind = Tok::LBrace; advance(); return;
      case '}': t.kind = Tok::RBrace; advance(); return;
      case ',': t.kind = Tok::Comma; advance(); return;
      case '=': t.kind = Tok::Eq; advance(); return;
      case '~':
        if (peek(1) == '=') {
          t.kind = Tok::Approx;
          advance(2);
          return;
        }
        break;
      case '<':
        if (peek(1) == '=') {
          t.kind = Tok::Le;
          advance(2);
        } else {
          t.kind = Tok::Lt;
          advance();
        }
        return;
      case '>':
        if (peek(1) == '=') {
          t.kind = Tok::Ge;
          advance(2);
        } else {
          t.kind = Tok::Gt;
          advance();
        }
        return;
      default:
        break;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') advance();
    bool is_float = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    } else if (peek() == '.' && !ident_start(peek(1))) {
      is_float = true;
      advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t off = (peek(1) == '-' || peek(1) == '+') ? 2 : 1;
      if (std::isdigit(static_cast<unsigned char>(peek(off)))) {
        is_float = true;
        advance(off);
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    std::string_view text = src_.substr(start, pos_ - start);
    auto v = parse_cell(text, is_float ? ValueType::Float : ValueType::Int);
    if (!v) fail("malformed number '" + std::string(text) + "'");
    t.kind = is_float ? Tok::Float : Tok::Int;
    t.value = std::move(*v);
    t.text = std::string(text);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const Catalog& catalog)
      : toks_(std::move(toks)), catalog_(catalog) {
    // Tables named anywhere in the text disambiguate bare column names.
    for (const auto& t : toks_)
      if (t.kind == Tok::Ident && catalog_.find_table(t.text)) named_tables_.insert(t.text);
  }

  TableExpr run_chain() {
    TableExpr e = texpr();
    if (cur().kind != Tok::End) fail("unexpected trailing input");
    return e;
  }

  SketchAst run() {
    SketchAst ast = query();
    if (cur().kind != Tok::End) fail("unexpected trailing input");
    return ast;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& at(std::size_t ahead) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(cur().line, cur().col, msg);
  }
  bool keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = at(ahead);
    return t.kind == Tok::Ident && upper(t.text) == kw;
  }
  void expect_keyword(std::string_view kw) {
    if (!keyword(kw)) fail("expected " + std::string(kw));
    ++pos_;
  }
  void expect(Tok kind, const char* what) {
    if (cur().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }
  bool reserved(const Token& t) const {
    if (t.kind != Tok::Ident) return false;
    static const char* kws[] = {"SELECT", "FROM", "WHERE", "ON", "AND", "OR",
                                "TRUE", "IN", "CONTAINS"};
    std::string u = upper(t.text);
    for (const char* k : kws)
      if (u == k) return true;
    return false;
  }

  void register_hole(const Token& t) {
    auto [it, fresh] = hole_kinds_.emplace(t.text, t.hole_kind);
    if (!fresh && it->second != t.hole_kind)
      throw Error(Errc::HoleKindConflict, "hole '" + t.text + "' used as both " +
                                              std::string(hole_kind_name(it->second)) +
                                              " and " +
                                              std::string(hole_kind_name(t.hole_kind)));
  }

  [[noreturn]] void forbidden(const Token& t, const std::string& where) const {
    throw Error(Errc::HoleAtForbiddenPosition,
                "hole '" + t.text + "' (" + std::string(hole_kind_name(t.hole_kind)) +
                    ") at " + std::to_string(t.line) + ":" + std::to_string(t.col) +
                    " cannot appear " + where);
  }

  ColumnRef resolve_column(const Token& t) const {
    if (t.text.find('.') != std::string::npos) {
      auto id = catalog_.find_column(t.text);
      if (!id) throw Error(Errc::UnknownColumnConstant, t.text);
      const auto& def = catalog_.column(*id);
      return {def.table_name, def.column_name};
    }
    auto ids = catalog_.columns_named(t.text);
    if (ids.empty()) throw Error(Errc::UnknownColumnConstant, t.text);
    if (ids.size() > 1) {
      std::vector<ColumnId> in_scope;
      for (ColumnId id : ids)
        if (named_tables_.count(catalog_.column(id).table_name)) in_scope.push_back(id);
      if (in_scope.size() == 1) ids = in_scope;
    }
    if (ids.size() > 1)
      throw Error(Errc::UnknownColumnConstant,
                  "'" + t.text + "' is ambiguous; qualify it as table.column");
    const auto& def = catalog_.column(ids.front());
    return {def.table_name, def.column_name};
  }

  ColumnSlot slot() {
    const Token& t = cur();
    if (t.kind == Tok::Hole) {
      if (t.hole_kind != HoleKind::Column) forbidden(t, "in a column position");
      register_hole(t);
      ++pos_;
      return Hole{t.text, HoleKind::Column};
    }
    if (t.kind == Tok::Ident && !reserved(t)) {
      ++pos_;
      return resolve_column(t);
    }
    fail("expected a column or ??name:column");
  }

  bool literal_start() const {
    switch (cur().kind) {
      case Tok::Int:
      case Tok::Float:
      case Tok::String:
      case Tok::Regex:
        return true;
      default:
        return false;
    }
  }

  // Returns the literal and whether it was a regex.
  std::pair<Value, bool> literal() {
    const Token& t = cur();
    if (t.kind == Tok::Hole) forbidden(t, "in a constant position");
    if (!literal_start()) fail("expected a literal");
    ++pos_;
    if (t.kind == Tok::Regex) return {Value(t.text), true};
    return {t.value, false};
  }

  Value plain_literal() {
    auto [v, is_regex] = literal();
    if (is_regex) fail("regular expressions are only allowed in contains and ~=");
    return v;
  }

  SketchAst query() {
    if (cur().kind == Tok::LParen && keyword("SELECT", 1)) {
      ++pos_;
      SketchAst inner = query();
      expect(Tok::RParen, "')'");
      if (cur().kind == Tok::LBrace) append(inner.query_soft, soft_block());
      return inner;
    }
    SketchAst ast;
    expect_keyword("SELECT");
    ast.projection.push_back(slot());
    while (cur().kind == Tok::Comma) {
      ++pos_;
      ast.projection.push_back(slot());
    }
    expect_keyword("FROM");
    ast.from = texpr();
    if (keyword("WHERE")) {
      ++pos_;
      ast.where = predicate();
      if (cur().kind == Tok::LBrace) ast.select_soft = soft_block();
    }
    return ast;
  }

  static void append(SoftConstraint& into, SoftConstraint more) {
    for (auto& p : more.conjuncts) into.conjuncts.push_back(std::move(p));
  }

  TableExpr texpr() {
    const Token& t = cur();
    if (at(1).kind == Tok::InnerJoin) {
      if (t.kind == Tok::Hole) forbidden(t, "on the left of INNER-JOIN");
      if (t.kind != Tok::Ident || reserved(t)) fail("left side of INNER-JOIN must be a table name");
      std::string left = table_name(t);
      ++pos_;
      ++pos_;  // INNER-JOIN
      TableExpr right = atom();
      expect_keyword("ON");
      JoinKeys keys;
      keys.left = slot();
      expect(Tok::Eq, "'='");
      keys.right = slot();
      TableExpr out;
      out.links.push_back(ChainLink{left, {}});
      if (cur().kind == Tok::LBrace) out.links.front().soft = soft_block();
      out.joins.push_back(std::move(keys));
      for (auto& l : right.links) out.links.push_back(std::move(l));
      for (auto& j : right.joins) out.joins.push_back(std::move(j));
      return out;
    }
    return atom();
  }

  std::string table_name(const Token& t) const {
    if (!catalog_.find_table(t.text)) throw Error(Errc::UnknownTable, t.text);
    return t.text;
  }

  TableExpr atom() {
    const Token& t = cur();
    TableExpr out;
    if (t.kind == Tok::LParen) {
      ++pos_;
      out = texpr();
      expect(Tok::RParen, "')'");
    } else if (t.kind == Tok::Hole) {
      if (t.hole_kind != HoleKind::Table) forbidden(t, "in a table position");
      register_hole(t);
      ++pos_;
      out.links.push_back(ChainLink{Hole{t.text, HoleKind::Table}, {}});
    } else if (t.kind == Tok::Ident && !reserved(t)) {
      out.links.push_back(ChainLink{table_name(t), {}});
      ++pos_;
    } else {
      fail("expected a table, ??name:table or '('");
    }
    if (cur().kind == Tok::LBrace) append(out.links.front().soft, soft_block());
    return out;
  }

  SoftConstraint soft_block() {
    expect(Tok::LBrace, "'{'");
    SoftConstraint out;
    if (cur().kind != Tok::RBrace) soft_conj(out);
    expect(Tok::RBrace, "'}'");
    return out;
  }

  void soft_conj(SoftConstraint& out) {
    soft_item(out);
    while (keyword("AND")) {
      ++pos_;
      soft_item(out);
    }
  }

  static SoftOp flip_bound(Tok op) { return op == Tok::Le ? SoftOp::AtLeast : SoftOp::AtMost; }

  void soft_item(SoftConstraint& out) {
    if (cur().kind == Tok::LParen) {
      ++pos_;
      soft_conj(out);
      expect(Tok::RParen, "')'");
      return;
    }
    if (keyword("TRUE")) {
      ++pos_;
      return;
    }
    if (keyword("CONTAINS")) {
      ++pos_;
      SoftPrimitive p;
      p.op = SoftOp::Contains;
      p.regex = true;
      bool call = cur().kind == Tok::LParen;
      if (call) ++pos_;
      p.column = slot();
      if (call) expect(Tok::Comma, "','");
      if (cur().kind != Tok::String && cur().kind != Tok::Regex)
        fail("contains expects a pattern string");
      p.value = cur().text;
      ++pos_;
      if (call) expect(Tok::RParen, "')'");
      out.conjuncts.push_back(std::move(p));
      return;
    }
    if (cur().kind == Tok::Hole && cur().hole_kind == HoleKind::Table)
      forbidden(cur(), "inside a soft constraint");
    if (literal_start()) {
      auto [lit, is_regex] = literal();
      if (keyword("IN")) {
        if (is_regex) fail("'in' expects a plain literal");
        ++pos_;
        SoftPrimitive p;
        p.op = SoftOp::Member;
        p.value = std::move(lit);
        p.column = slot();
        out.conjuncts.push_back(std::move(p));
        return;
      }
      Tok op = cur().kind;
      if (op != Tok::Le && op != Tok::Ge) fail("expected 'in', '<=' or '>=' after literal");
      if (is_regex) fail("regular expressions are only allowed in contains and ~=");
      ++pos_;
      ColumnSlot col = slot();
      out.conjuncts.push_back(SoftPrimitive{flip_bound(op), col, std::move(lit), false});
      if (cur().kind == Tok::Le || cur().kind == Tok::Ge) {
        Tok op2 = cur().kind;
        if (op2 != op) fail("mixed directions in a bound chain");
        ++pos_;
        Value hi = plain_literal();
        SoftOp second = op2 == Tok::Le ? SoftOp::AtMost : SoftOp::AtLeast;
        out.conjuncts.push_back(SoftPrimitive{second, col, std::move(hi), false});
      }
      return;
    }
    ColumnSlot col = slot();
    Tok op = cur().kind;
    SoftPrimitive p;
    p.column = std::move(col);
    if (op == Tok::Le) {
      p.op = SoftOp::AtMost;
    } else if (op == Tok::Ge) {
      p.op = SoftOp::AtLeast;
    } else if (op == Tok::Approx) {
      p.op = SoftOp::About;
    } else {
      fail("expected '<=', '>=' or '~=' in soft constraint");
    }
    ++pos_;
    if (p.op == SoftOp::About) {
      auto [v, is_regex] = literal();
      p.value = std::move(v);
      p.regex = is_regex;
    } else {
      p.value = plain_literal();
    }
    out.conjuncts.push_back(std::move(p));
  }

  Predicate predicate() {
    Predicate left = pred_conj();
    while (keyword("OR")) {
      ++pos_;
      left = Predicate::disj(std::move(left), pred_conj());
    }
    return left;
  }

  Predicate pred_conj() {
    Predicate left = pred_atom();
    while (keyword("AND")) {
      ++pos_;
      left = Predicate::conj(std::move(left), pred_atom());
    }
    return left;
  }

  static std::optional<RelOp> relop(Tok t) {
    switch (t) {
      case Tok::Lt: return RelOp::Lt;
      case Tok::Le: return RelOp::Le;
      case Tok::Eq: return RelOp::Eq;
      case Tok::Gt: return RelOp::Gt;
      case Tok::Ge: return RelOp::Ge;
      default: return std::nullopt;
    }
  }

  static RelOp mirror(RelOp op) {
    switch (op) {
      case RelOp::Lt: return RelOp::Gt;
      case RelOp::Le: return RelOp::Ge;
      case RelOp::Gt: return RelOp::Lt;
      case RelOp::Ge: return RelOp::Le;
      case RelOp::Eq: return RelOp::Eq;
    }
    return op;
  }

  Predicate pred_atom() {
    if (cur().kind == Tok::LParen) {
      ++pos_;
      Predicate p = predicate();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (keyword("TRUE")) {
      ++pos_;
      return Predicate::truth();
    }
    if (literal_start()) {
      Value lit = plain_literal();
      auto op = relop(cur().kind);
      if (!op) fail("expected a comparison operator");
      ++pos_;
      ColumnSlot col = slot();
      return Predicate::compare({std::move(col), mirror(*op), std::move(lit)});
    }
    ColumnSlot col = slot();
    auto op = relop(cur().kind);
    if (!op) fail("expected a comparison operator");
    ++pos_;
    Value lit = plain_literal();
    return Predicate::compare({std::move(col), *op, std::move(lit)});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Catalog& catalog_;
  std::set<std::string> named_tables_;
  std::map<std::string, HoleKind> hole_kinds_;
};

}  // namespace

TableExpr parse_table_expr(std::string_view text, const Catalog& catalog) {
  Parser parser(Lexer(text).run(), catalog);
  return parser.run_chain();
}

SketchAst parse_sketch(std::string_view text, const Catalog& catalog) {
  Parser parser(Lexer(text).run(), catalog);
  return parser.run();
}

}  // namespace sqlsketch
