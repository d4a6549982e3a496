#include "dj/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>

#include "dj/lexer.hpp"

namespace dj {

namespace {

using namespace ast;

// Internal failure; `at` indexes the offending token.
struct Fail {
  std::size_t at;
  std::string expected;
};

bool is_entity_name(const std::string& s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool is_attr_name(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
      return false;
    }
  }
  return true;
}

Query at(Query q, SourcePos pos) { return std::make_shared<const QueryNode>(QueryNode{q->node, pos}); }
Condition at(Condition c, SourcePos pos) {
  return std::make_shared<const ConditionNode>(ConditionNode{c->node, pos});
}
Scalar at(Scalar s, SourcePos pos) { return std::make_shared<const ScalarNode>(ScalarNode{s->node, pos}); }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {
    for (auto& t : tokenize(src)) {
      if (t.kind == TokenKind::Comment) {
        comments_.emplace(t.line, t.text);
      } else {
        toks_.push_back(std::move(t));
      }
    }
    limit_ = toks_.size() - 1;
    // A blank line outside brackets ends any statement except a declaration.
    hard_break_.assign(toks_.size(), false);
    int depth = 0;
    for (std::size_t k = 0; k < toks_.size(); ++k) {
      if (depth == 0 && blank_line_before(k)) hard_break_[k] = true;
      const Token& t = toks_[k];
      if (t.is_symbol("(") || t.is_symbol("[") || t.is_symbol("{")) ++depth;
      if ((t.is_symbol(")") || t.is_symbol("]") || t.is_symbol("}")) && depth > 0) --depth;
    }
  }

  std::vector<Statement> script() {
    std::vector<Statement> out;
    std::vector<ParseDiagnostic> diags;
    while (peek().kind != TokenKind::End) {
      if (accept_symbol(";")) continue;
      const std::size_t start = i_;
      set_limit(start);
      try {
        out.push_back(statement());
      } catch (const Fail& f) {
        diags.push_back(diagnostic(f));
        limit_ = toks_.size() - 1;
        recover(start, f.at);
      }
      limit_ = toks_.size() - 1;
    }
    if (!diags.empty()) throw ParseError(std::move(diags));
    return out;
  }

  Query whole_query() {
    try {
      Query q = union_level();
      if (peek().kind != TokenKind::End) fail("end of input");
      return q;
    } catch (const Fail& f) {
      throw ParseError({diagnostic(f)});
    }
  }

  Condition whole_condition() {
    try {
      const SourcePos pos = peek().pos();
      std::vector<Condition> items{cond_operand(true)};
      while (peek().is_symbol("&") || peek().is_symbol("\\")) {
        const bool exclude = next().text == "\\";
        Condition c = cond_operand(false);
        items.push_back(exclude ? at(negate(c), c->pos) : c);
      }
      if (peek().kind != TokenKind::End) fail("end of input");
      if (items.size() == 1) return items.front();
      return at(all_of(std::move(items)), pos);
    } catch (const Fail& f) {
      throw ParseError({diagnostic(f)});
    }
  }

 private:
  // ---- token helpers ------------------------------------------------------

  void set_limit(std::size_t start) {
    limit_ = toks_.size() - 1;
    if (toks_[start].is_symbol("::")) return;
    for (std::size_t k = start + 1; k < toks_.size(); ++k) {
      if (hard_break_[k]) {
        limit_ = k;
        break;
      }
    }
    boundary_ = Token{};
    boundary_.kind = TokenKind::End;
    boundary_.line = toks_[limit_].line;
    boundary_.column = toks_[limit_].column;
    boundary_.offset = boundary_.end = toks_[limit_].offset;
  }

  const Token& peek(std::size_t k = 0) const {
    const std::size_t idx = i_ + k;
    if (idx >= limit_) return limit_ == toks_.size() - 1 ? toks_.back() : boundary_;
    return toks_[idx];
  }
  const Token& next() {
    const Token& t = peek();
    if (i_ < limit_) ++i_;
    return t;
  }
  const Token& previous() const { return toks_[i_ == 0 ? 0 : i_ - 1]; }

  [[noreturn]] void fail(std::string expected) const { throw Fail{i_, std::move(expected)}; }
  [[noreturn]] void fail_at(std::size_t index, std::string expected) const { throw Fail{index, std::move(expected)}; }

  bool accept_symbol(std::string_view s) {
    if (!peek().is_symbol(s)) return false;
    next();
    return true;
  }
  bool accept_keyword(std::string_view s) {
    if (!peek().is_keyword(s)) return false;
    next();
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("'" + std::string(s) + "'");
  }
  // A call's opening parenthesis must sit on the same line as the name.
  void expect_call_paren() {
    if (!peek().is_symbol("(") || peek().line != previous().line) fail("'('");
    next();
  }

  ParseDiagnostic diagnostic(const Fail& f) const {
    const Token& t = toks_[std::min(f.at, toks_.size() - 1)];
    ParseDiagnostic d;
    d.expected = f.expected;
    if (t.kind == TokenKind::End || (f.at == limit_ && f.at > 0 && f.at < toks_.size() - 1)) {
      d.found = "end of input";
      d.pos = f.at > 0 ? toks_[f.at - 1].pos() : t.pos();
      return d;
    }
    d.pos = t.pos();
    switch (t.kind) {
      case TokenKind::String: d.found = "\"" + t.text + "\""; break;
      default: d.found = "'" + t.text + "'"; break;
    }
    return d;
  }

  bool blank_line_before(std::size_t k) const {
    if (k == 0 || k >= toks_.size()) return false;
    std::string_view gap = src_.substr(toks_[k - 1].end, toks_[k].offset - toks_[k - 1].end);
    std::size_t first = gap.find('\n');
    if (first == std::string_view::npos) return false;
    gap.remove_prefix(first + 1);
    while (true) {
      std::size_t nl = gap.find('\n');
      if (nl == std::string_view::npos) return false;
      bool blank = true;
      for (char c : gap.substr(0, nl)) {
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      }
      if (blank) return true;
      gap.remove_prefix(nl + 1);
    }
  }

  void recover(std::size_t start, std::size_t fail_at) {
    i_ = std::max(start + 1, std::min(fail_at, toks_.size() - 1));
    if (i_ <= start) i_ = start + 1;
    if (i_ >= toks_.size()) i_ = toks_.size() - 1;
    // Never resume in the middle of the failing line.
    while (peek().kind != TokenKind::End) {
      if (peek().is_symbol("::") && i_ > start) return;
      if (blank_line_before(i_) && i_ > start) return;
      next();
    }
  }

  void end_statement() {
    const Token& t = peek();
    if (t.kind == TokenKind::End) return;
    if (t.is_symbol(";")) {
      next();
      return;
    }
    if (t.line > previous().line) return;
    fail("end of statement");
  }

  // ---- statements ---------------------------------------------------------

  Statement statement() {
    const std::size_t start = i_;
    const Token& first = peek();
    Statement st;
    st.pos = first.pos();
    if (first.is_symbol("::")) {
      st.node = entity_decl();
    } else if (first.is_keyword("insert")) {
      st.node = Manipulation{insert()};
    } else if (first.is_keyword("delete")) {
      st.node = Manipulation{remove()};
    } else if (first.is_keyword("update")) {
      st.node = Manipulation{update()};
    } else if (first.is_keyword("populate")) {
      next();
      st.node = Manipulation{Populate{entity_name()}};
    } else if (first.is_keyword("make")) {
      next();
      MakeDecl m;
      m.entity = entity_name();
      expect_symbol("=");
      m.body = union_level();
      st.node = std::move(m);
    } else if (first.kind == TokenKind::Identifier && peek(1).is_symbol("=")) {
      Assignment a;
      a.name = next().text;
      next();
      a.expr = union_level();
      st.node = std::move(a);
    } else if (starts_query(first)) {
      st.node = union_level();
    } else {
      fail("statement");
    }
    if (!std::holds_alternative<EntityDecl>(st.node)) end_statement();
    std::size_t last = i_ == 0 ? 0 : i_ - 1;
    if (last < start) last = start;
    const std::size_t end_off = toks_[last].is_symbol(";") && last > start ? toks_[last - 1].end : toks_[last].end;
    st.text = std::string(src_.substr(toks_[start].offset, end_off - toks_[start].offset));
    return st;
  }

  static bool starts_query(const Token& t) {
    return t.kind == TokenKind::Identifier || t.is_keyword("U") || t.is_symbol("(");
  }

  std::string entity_name() {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier || !is_entity_name(t.text)) fail("entity set name");
    std::string name = next().text;
    if (peek().is_symbol(".") && peek(1).kind == TokenKind::Identifier && is_entity_name(peek(1).text)) {
      next();
      name += "." + next().text;
    }
    return name;
  }

  // ---- declarations -------------------------------------------------------

  EntityDecl entity_decl() {
    EntityDecl decl;
    decl.pos = peek().pos();
    expect_symbol("::");
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier || !is_entity_name(t.text)) fail("entity set name");
    decl.name = next().text;
    if (peek().is_symbol(".")) {
      next();
      if (peek().kind != TokenKind::Identifier || !is_entity_name(peek().text)) fail("part name");
      decl.name += "." + next().text;
    }
    int line = previous().line;
    while (true) {
      const Token& tok = peek();
      if (tok.kind == TokenKind::End || tok.is_symbol("::")) break;
      if (tok.is_symbol(";")) {
        next();
        break;
      }
      if (tok.line == line) fail("end of line");
      if (tok.is_symbol("---")) {
        if (decl.has_divider) fail("declaration item");
        decl.has_divider = true;
        next();
      } else if (tok.is_symbol("->")) {
        DependencyDecl dep = dependency(decl);
        (decl.has_divider ? decl.secondary_items : decl.primary_items).push_back(std::move(dep));
      } else if (attribute_line()) {
        AttrDecl a = attribute();
        (decl.has_divider ? decl.secondary_items : decl.primary_items).push_back(std::move(a));
      } else {
        break;
      }
      line = previous().line;
    }
    return decl;
  }

  bool literal_start(const Token& t) const {
    return t.kind == TokenKind::Number || t.kind == TokenKind::String || t.is_keyword("null");
  }

  bool attribute_line() const {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier && t.kind != TokenKind::Keyword) return false;
    if (peek(1).is_symbol(":")) return true;
    return peek(1).is_symbol("=") && literal_start(peek(2)) && peek(3).is_symbol(":");
  }

  AttrDecl attribute() {
    AttrDecl a;
    const Token& t = peek();
    a.pos = t.pos();
    if (t.kind == TokenKind::Keyword) fail("attribute name (reserved word)");
    if (!is_attr_name(t.text)) fail("attribute name in lower case");
    a.name = next().text;
    if (accept_symbol("=")) a.default_value = literal(true);
    expect_symbol(":");
    a.type = datatype();
    if (auto it = comments_.find(t.line); it != comments_.end()) a.comment = it->second;
    return a;
  }

  int small_int() {
    const Token& t = peek();
    int v = 0;
    if (t.kind != TokenKind::Number) fail("integer");
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail("integer");
    next();
    return v;
  }

  Datatype datatype() {
    const std::size_t start = i_;
    const Token& t = peek();
    if (t.kind != TokenKind::Keyword) fail("datatype");
    Datatype type;
    const std::string word = t.text;
    next();
    if (word == "int") {
      type = Datatype::of(accept_keyword("unsigned") ? Datatype::Kind::IntUnsigned : Datatype::Kind::Int);
    } else if (word == "decimal") {
      expect_symbol("(");
      const int n = small_int();
      expect_symbol(",");
      const int m = small_int();
      expect_symbol(")");
      type = Datatype::decimal(n, m);
    } else if (word == "char" || word == "varchar") {
      expect_symbol("(");
      const int n = small_int();
      expect_symbol(")");
      type = word == "char" ? Datatype::chars(n) : Datatype::varchar(n);
    } else if (word == "date") {
      type = Datatype::of(Datatype::Kind::Date);
    } else if (word == "datetime") {
      type = Datatype::of(Datatype::Kind::Datetime);
    } else if (word == "year") {
      type = Datatype::of(Datatype::Kind::Year);
    } else if (word == "double") {
      type = Datatype::of(Datatype::Kind::Double);
    } else if (word == "enum") {
      expect_symbol("(");
      std::vector<std::string> values;
      do {
        if (peek().kind != TokenKind::String) fail("enum value string");
        values.push_back(next().text);
      } while (accept_symbol(","));
      expect_symbol(")");
      type = Datatype::enumeration(std::move(values));
    } else {
      fail_at(start, "datatype");
    }
    try {
      validate_datatype(type);
    } catch (const Error& e) {
      fail_at(start, "valid datatype (" + std::string(e.what()) + ")");
    }
    return type;
  }

  DependencyDecl dependency(const EntityDecl& decl) {
    DependencyDecl dep;
    dep.pos = peek().pos();
    expect_symbol("->");
    if (accept_symbol("[")) {
      do {
        const Token& o = peek();
        if (o.is(TokenKind::Identifier, "unique")) {
          dep.unique = true;
        } else if (o.is(TokenKind::Identifier, "nullable")) {
          dep.nullable = true;
        } else {
          fail("'unique' or 'nullable'");
        }
        next();
      } while (accept_symbol(","));
      expect_symbol("]");
    }
    if (peek().is_keyword("master")) {
      if (!decl.is_part()) fail("dependency target ('master' is legal only in a part declaration)");
      const SourcePos p = next().pos();
      dep.is_master = true;
      dep.target = at(base(decl.master_name()), p);
    } else {
      dep.target = union_level();
    }
    return dep;
  }

  // ---- manipulations ------------------------------------------------------

  Value number_value(const Token& t) {
    const std::string& s = t.text;
    if (s.find_first_of(".eE") != std::string::npos) {
      double d = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
      if (ec != std::errc() || p != s.data() + s.size()) fail("number");
      return d;
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("integer within 64-bit range");
    return v;
  }

  Value literal(bool allow_null) {
    const Token& t = peek();
    if (t.kind == TokenKind::Number) {
      Value v = number_value(t);
      next();
      return v;
    }
    if (t.kind == TokenKind::String) return next().text;
    if (t.is_keyword("null") && allow_null) {
      next();
      return Null{};
    }
    fail("literal value");
  }

  InsertBlock insert_block(std::string entity) {
    InsertBlock block;
    block.entity = std::move(entity);
    if (accept_symbol("(")) {
      do {
        const Token& t = peek();
        if (t.kind != TokenKind::Identifier) fail("attribute name");
        block.attrs.push_back(next().text);
      } while (accept_symbol(","));
      expect_symbol(")");
    }
    expect_symbol(":");
    do {
      const std::size_t row_start = i_;
      expect_symbol("(");
      Row row;
      do {
        row.push_back(literal(true));
      } while (accept_symbol(","));
      expect_symbol(")");
      if (!block.attrs.empty() && row.size() != block.attrs.size()) {
        fail_at(row_start, "row of " + std::to_string(block.attrs.size()) + " values");
      }
      block.rows.push_back(std::move(row));
    } while (accept_symbol(","));
    return block;
  }

  Insert insert() {
    next();
    Insert ins;
    ins.main = insert_block(entity_name());
    while (accept_keyword("with")) {
      std::string part = entity_name();
      if (part.find('.') == std::string::npos) part = ins.main.entity + "." + part;
      ins.parts.push_back(insert_block(std::move(part)));
    }
    return ins;
  }

  // `& c1 \ c2 ...` after a manipulation target, folded into one condition.
  Condition condition_chain() {
    std::vector<Condition> items;
    const SourcePos pos = peek().pos();
    while (peek().is_symbol("&") || peek().is_symbol("\\")) {
      const bool exclude = next().text == "\\";
      Condition c = cond_operand(false);
      items.push_back(exclude ? at(negate(c), c->pos) : c);
    }
    if (items.size() == 1) return items.front();
    return at(all_of(std::move(items)), pos);
  }

  Delete remove() {
    next();
    Delete d;
    d.entity = entity_name();
    d.cond = condition_chain();
    return d;
  }

  Update update() {
    next();
    Update u;
    u.entity = entity_name();
    u.cond = condition_chain();
    expect_symbol(":");
    do {
      const Token& t = peek();
      if (t.kind != TokenKind::Identifier) fail("attribute name");
      std::string name = next().text;
      expect_symbol(":");
      u.assignments.emplace_back(std::move(name), literal(true));
    } while (accept_symbol(","));
    return u;
  }

  // ---- queries ------------------------------------------------------------

  Query union_level() {
    const SourcePos pos = peek().pos();
    Query q = restrict_level();
    while (accept_symbol("+")) q = at(unite(q, restrict_level()), pos);
    return q;
  }

  Query restrict_level() {
    const SourcePos pos = peek().pos();
    Query q = join_level();
    while (peek().is_symbol("&") || peek().is_symbol("\\")) {
      const bool exclude = next().text == "\\";
      Condition c = cond_operand(false);
      q = at(exclude ? ast::exclude(q, c) : ast::restrict(q, c), pos);
    }
    return q;
  }

  Query join_level() {
    const SourcePos pos = peek().pos();
    Query q = postfix();
    while (accept_symbol("*")) q = at(join(q, postfix()), pos);
    return q;
  }

  Query postfix() {
    const SourcePos pos = peek().pos();
    Query q = primary();
    while (peek().is_symbol(".")) {
      next();
      const Token& t = peek();
      if (t.is(TokenKind::Identifier, "proj")) {
        next();
        expect_call_paren();
        q = at(projection(q), pos);
      } else if (t.is(TokenKind::Identifier, "aggr")) {
        next();
        expect_call_paren();
        q = at(aggregation(q), pos);
      } else {
        fail("'proj' or 'aggr'");
      }
    }
    return q;
  }

  Query primary() {
    const Token& t = peek();
    const SourcePos pos = t.pos();
    if (t.is_symbol("(")) {
      next();
      Query q = union_level();
      expect_symbol(")");
      return q;
    }
    if (t.is_keyword("U")) {
      next();
      expect_call_paren();
      std::vector<std::string> attrs;
      if (!peek().is_symbol(")")) {
        do {
          if (peek().kind != TokenKind::Identifier) fail("attribute name");
          attrs.push_back(next().text);
        } while (accept_symbol(","));
      }
      expect_symbol(")");
      return at(universal(std::move(attrs)), pos);
    }
    if (t.kind == TokenKind::Identifier) {
      std::string name = next().text;
      if (peek().is_symbol(".") && peek(1).kind == TokenKind::Identifier && is_entity_name(peek(1).text)) {
        next();
        name += "." + next().text;
      }
      return at(base(std::move(name)), pos);
    }
    fail("query expression");
  }

  std::string item_name() {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) fail("attribute name");
    return next().text;
  }

  ProjItem named_item() {
    std::string name = item_name();
    expect_symbol(":");
    const Token& t = peek();
    if (t.kind == TokenKind::Identifier && !peek(1).is_symbol("(") && ends_item(peek(1))) {
      next();
      return rename(std::move(name), t.text);
    }
    return compute(std::move(name), scalar_add());
  }

  static bool ends_item(const Token& t) { return t.is_symbol(",") || t.is_symbol(")"); }

  Query projection(const Query& operand) {
    std::vector<ProjItem> items;
    bool ellipsis = false;
    if (!peek().is_symbol(")")) {
      do {
        if (accept_symbol("...")) {
          ellipsis = true;
        } else if (peek(1).is_symbol(":")) {
          items.push_back(named_item());
        } else {
          items.push_back(keep(item_name()));
        }
      } while (accept_symbol(","));
    }
    expect_symbol(")");
    return project(operand, std::move(items), ellipsis);
  }

  Query aggregation(const Query& operand) {
    std::vector<Query> positional;
    std::vector<std::size_t> positional_at;
    std::vector<ProjItem> named;
    bool ellipsis = false;
    if (!peek().is_symbol(")")) {
      do {
        if (accept_symbol("...")) {
          ellipsis = true;
        } else if (peek().kind == TokenKind::Identifier && peek(1).is_symbol(":")) {
          named.push_back(named_item());
        } else {
          if (!named.empty() || ellipsis) fail("named argument");
          positional_at.push_back(i_);
          positional.push_back(union_level());
        }
      } while (accept_symbol(","));
    }
    if (positional.empty()) fail("aggregated entity set");
    expect_symbol(")");
    std::vector<ProjItem> items;
    for (std::size_t k = 0; k + 1 < positional.size(); ++k) {
      const auto* ref = std::get_if<BaseRef>(&positional[k]->node);
      if (ref == nullptr) fail_at(positional_at[k], "attribute name");
      items.push_back(keep(ref->name));
    }
    for (auto& item : named) items.push_back(std::move(item));
    return aggregate(operand, positional.back(), std::move(items), ellipsis);
  }

  // ---- conditions ---------------------------------------------------------

  // One restriction operand. `delimited` is true inside brackets or call
  // parentheses, where a full query expression is unambiguous.
  Condition cond_operand(bool delimited) {
    const Token& t = peek();
    const SourcePos pos = t.pos();
    if (t.is_symbol("{")) {
      next();
      std::vector<std::pair<std::string, Value>> entries;
      if (!peek().is_symbol("}")) {
        do {
          const Token& k = peek();
          if (k.kind != TokenKind::Identifier && k.kind != TokenKind::String) fail("attribute name");
          std::string key = next().text;
          expect_symbol(":");
          entries.emplace_back(std::move(key), literal(true));
        } while (accept_symbol(","));
      }
      expect_symbol("}");
      return at(mapping(std::move(entries)), pos);
    }
    if (t.is_symbol("[")) {
      next();
      std::vector<Condition> items = cond_items("]");
      return at(any_of(std::move(items)), pos);
    }
    if (t.is_keyword("And")) {
      next();
      expect_call_paren();
      std::vector<Condition> items;
      if (accept_symbol("[")) {
        items = cond_items("]");
        expect_symbol(")");
      } else {
        items = cond_items(")");
      }
      return at(all_of(std::move(items)), pos);
    }
    if (t.is_keyword("Not")) {
      next();
      expect_call_paren();
      Condition c = cond_operand(true);
      expect_symbol(")");
      return at(negate(c), pos);
    }
    return comparison_or_query(delimited);
  }

  std::vector<Condition> cond_items(std::string_view close) {
    std::vector<Condition> items;
    if (!peek().is_symbol(close)) {
      do {
        items.push_back(cond_operand(true));
      } while (accept_symbol(","));
    }
    expect_symbol(close);
    return items;
  }

  Condition comparison_or_query(bool delimited) {
    const std::size_t start = i_;
    const SourcePos pos = peek().pos();
    Fail best{0, ""};
    try {
      return comparison();
    } catch (const Fail& f) {
      best = f;
      i_ = start;
    }
    try {
      Query q = delimited ? union_level() : join_level();
      return at(subquery(q), pos);
    } catch (const Fail& f) {
      if (f.at > best.at) best = f;
      i_ = start;
    }
    throw best;
  }

  Condition comparison() {
    const std::size_t start = i_;
    const SourcePos pos = peek().pos();
    std::optional<Fail> best;
    if (peek().is_symbol("(")) {
      try {
        next();
        Condition c = comparison();
        expect_symbol(")");
        return c;
      } catch (const Fail& f) {
        best = f;
        i_ = start;
      }
    }
    try {
      Scalar lhs = scalar_add();
      const Token& op = peek();
      CmpOp cop;
      if (op.is_symbol("==") || op.is_symbol("=")) {
        cop = CmpOp::Eq;
      } else if (op.is_symbol("!=") || op.is_symbol("<>")) {
        cop = CmpOp::Ne;
      } else if (op.is_symbol("<")) {
        cop = CmpOp::Lt;
      } else if (op.is_symbol("<=")) {
        cop = CmpOp::Le;
      } else if (op.is_symbol(">")) {
        cop = CmpOp::Gt;
      } else if (op.is_symbol(">=")) {
        cop = CmpOp::Ge;
      } else if (op.is_keyword("in")) {
        next();
        expect_symbol("[");
        std::vector<Value> values;
        if (!peek().is_symbol("]")) {
          do {
            values.push_back(literal(false));
          } while (accept_symbol(","));
        }
        expect_symbol("]");
        return at(in_list(lhs, std::move(values)), pos);
      } else {
        fail("comparison operator");
      }
      next();
      Scalar rhs = scalar_add();
      return at(cmp(cop, lhs, rhs), pos);
    } catch (const Fail& f) {
      if (best && best->at > f.at) throw *best;
      throw;
    }
  }

  // ---- scalar expressions -------------------------------------------------

  Scalar scalar_add() {
    const SourcePos pos = peek().pos();
    Scalar s = scalar_mul();
    while (peek().is_symbol("+") || peek().is_symbol("-")) {
      const ArithOp op = next().text == "+" ? ArithOp::Add : ArithOp::Sub;
      s = at(arith(op, s, scalar_mul()), pos);
    }
    return s;
  }

  Scalar scalar_mul() {
    const SourcePos pos = peek().pos();
    Scalar s = scalar_unary();
    while (peek().is_symbol("*") || peek().is_symbol("/")) {
      const ArithOp op = next().text == "*" ? ArithOp::Mul : ArithOp::Div;
      s = at(arith(op, s, scalar_unary()), pos);
    }
    return s;
  }

  Scalar scalar_unary() {
    const SourcePos pos = peek().pos();
    if (accept_symbol("-")) {
      Scalar operand = scalar_unary();
      return std::make_shared<const ScalarNode>(ScalarNode{Negate{operand}, pos});
    }
    return scalar_primary();
  }

  Scalar scalar_primary() {
    const Token& t = peek();
    const SourcePos pos = t.pos();
    if (t.kind == TokenKind::Number) {
      Value v = number_value(t);
      next();
      return at(lit(std::move(v)), pos);
    }
    if (t.kind == TokenKind::String) return at(lit(next().text), pos);
    if (t.is_keyword("null")) fail("non-null value (a mapping {attr: null} matches nulls)");
    if (t.kind == TokenKind::Identifier) {
      if (peek(1).is_symbol("(") && peek(1).line == t.line) fail_at(i_, "aggregation function");
      return at(attr(next().text), pos);
    }
    if (t.kind == TokenKind::Keyword && is_aggregate_function(t.text)) {
      std::string fn = next().text;
      expect_call_paren();
      std::vector<Scalar> args;
      if (!peek().is_symbol(")")) {
        do {
          args.push_back(scalar_add());
        } while (accept_symbol(","));
      }
      expect_symbol(")");
      return at(call(std::move(fn), std::move(args)), pos);
    }
    if (t.is_symbol("(")) {
      next();
      Scalar s = scalar_add();
      expect_symbol(")");
      return s;
    }
    fail("expression");
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::multimap<int, std::string> comments_;
  std::vector<bool> hard_break_;
  std::size_t limit_ = 0;
  Token boundary_;
  std::size_t i_ = 0;
};

}  // namespace

std::vector<Statement> parse_script(std::string_view source) { return Parser(source).script(); }

Query parse_query(std::string_view source) { return Parser(source).whole_query(); }

Condition parse_condition(std::string_view source) { return Parser(source).whole_condition(); }

}  // namespace dj
