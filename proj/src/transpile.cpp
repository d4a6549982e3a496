#include "dj/transpile.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "dj/algebra.hpp"
#include "dj/printer.hpp"

namespace dj {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using namespace ast;

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "ADD",     "ALL",     "ALTER",   "AND",     "AS",       "ASC",     "BETWEEN", "BY",       "CASE",
      "CHECK",   "COLUMN",  "CONDITION", "CONSTRAINT", "CREATE", "CROSS", "CURRENT_DATE", "DATABASE",
      "DEFAULT", "DELETE",  "DESC",    "DISTINCT", "DROP",    "ELSE",    "EXISTS",  "FALSE",    "FOR",
      "FOREIGN", "FROM",    "FULL",    "GROUP",   "HAVING",   "IN",      "INDEX",   "INNER",    "INSERT",
      "INTERVAL", "INTO",   "IS",      "JOIN",    "KEY",      "KEYS",    "LEFT",    "LIKE",     "LIMIT",
      "MATCH",   "NATURAL", "NOT",     "NULL",    "ON",       "OR",      "ORDER",   "OUTER",    "PRIMARY",
      "RANGE",   "REFERENCES", "RIGHT", "ROW",    "ROWS",     "SELECT",  "SET",     "TABLE",    "THEN",
      "TO",      "TRUE",    "UNION",   "UNIQUE",  "UPDATE",   "USER",    "USING",   "VALUES",   "WHEN",
      "WHERE",   "WITH",
  };
  return words;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string join_strings(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string indent(const std::string& text, std::size_t n) {
  const std::string pad(n, ' ');
  std::string out = pad;
  for (char c : text) {
    out += c;
    if (c == '\n') out += pad;
  }
  return out;
}

bool looks_like_date(const std::string& s) {
  return s.size() >= 10 && s[4] == '-' && s[7] == '-' && std::isdigit(static_cast<unsigned char>(s[0]));
}

std::string column_type(const Datatype& t, const std::string& column, Dialect d) {
  using K = Datatype::Kind;
  if (d == Dialect::MySQL) return to_string(t);
  switch (t.kind) {
    case K::Int: return "integer";
    case K::IntUnsigned: return "integer CHECK (" + column + " >= 0)";
    case K::Year: return "integer";
    case K::Datetime: return "timestamp";
    case K::Double: return "double precision";
    case K::Text: return "text";
    case K::Enum: {
      std::size_t width = 1;
      std::vector<std::string> values;
      for (const auto& v : t.enum_values) {
        width = std::max(width, v.size());
        values.push_back(sql_literal(Value{v}, d));
      }
      return "varchar(" + std::to_string(width) + ") CHECK (" + column + " IN (" + join_strings(values, ", ") + "))";
    }
    default: return to_string(t);
  }
}

std::string comment_literal(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    if (c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Foreign key clauses reachable through renames and joins.
struct ForeignKey {
  std::string table;
  std::vector<std::string> local;
  std::vector<std::string> remote;
};

// Maps names visible at `q` to the base attribute they come from.
void trace_keys(const Query& q, const Catalog& catalog, std::map<std::string, std::string> visible,
                std::vector<ForeignKey>& out) {
  std::visit(overloaded{
                 [&](const BaseRef& n) {
                   const EntitySetDef& def = catalog.get(n.name);
                   ForeignKey fk{n.name, {}, {}};
                   for (const auto& pk : def.primary_key) {
                     for (const auto& [local, name] : visible) {
                       if (name == pk) {
                         fk.local.push_back(local);
                         fk.remote.push_back(pk);
                       }
                     }
                   }
                   if (!fk.local.empty()) out.push_back(std::move(fk));
                 },
                 [&](const Projection& n) {
                   std::map<std::string, std::string> inner;
                   for (const auto& [local, name] : visible) {
                     std::string source = name;
                     for (const auto& item : n.items) {
                       if (item.kind == ProjItem::Kind::Rename && item.name == name) source = item.source;
                     }
                     inner[local] = source;
                   }
                   trace_keys(n.operand, catalog, std::move(inner), out);
                 },
                 [&](const Join& n) {
                   trace_keys(n.left, catalog, visible, out);
                   trace_keys(n.right, catalog, visible, out);
                 },
                 [&](const auto&) {},
             },
             q->node);
}

// ---- queries -------------------------------------------------------------------

struct Select {
  std::vector<std::string> cols;  // empty means *
  std::string from;
  std::vector<std::string> where;
  std::vector<bool> where_or;  // item is a disjunction
  std::vector<std::string> group;
  std::string having;
  bool distinct = false;
  bool table = false;  // from is a single table or a chain of natural joins of tables

  bool simple() const { return cols.empty() && group.empty() && having.empty() && !distinct; }
  void add_where(std::string text, bool disjunction = false) {
    where.push_back(std::move(text));
    where_or.push_back(disjunction);
  }
};

std::string render(const Select& s) {
  std::string out = "SELECT ";
  if (s.distinct) out += "DISTINCT ";
  out += s.cols.empty() ? "*" : join_strings(s.cols, ", ");
  if (!s.from.empty()) out += "\nFROM " + s.from;
  for (std::size_t i = 0; i < s.where.size(); ++i) {
    const bool paren = s.where.size() > 1 && s.where_or[i];
    out += (i ? "\n    AND " : "\nWHERE ") + (paren ? "(" + s.where[i] + ")" : s.where[i]);
  }
  if (!s.group.empty()) out += "\nGROUP BY " + join_strings(s.group, ", ");
  if (!s.having.empty()) out += "\nHAVING " + s.having;
  return out;
}

struct Compiled {
  Select sel;
  Header header;
  std::vector<std::string> columns;  // output column names, including _omega

  bool omega() const { return std::find(columns.begin(), columns.end(), "_omega") != columns.end(); }
};

struct Cond {
  std::string text;
  bool disjunction = false;
};

struct ScalarSql {
  std::string text;
  Datatype type;
};

using Resolver = std::function<ScalarSql(const std::string& name, bool in_call)>;

class Compiler {
 public:
  Compiler(const Catalog& catalog, Dialect dialect) : catalog_(catalog), analyzer_(catalog), dialect_(dialect) {}

  Compiled compile(const Query& q, const Compiled* context = nullptr) {
    return std::visit(overloaded{
                          [&](const BaseRef& n) { return base(q, n); },
                          [&](const Universal& n) { return universal(q, n, context); },
                          [&](const Restriction& n) { return restriction(q, n, context); },
                          [&](const Join& n) { return join(q, n, context); },
                          [&](const Projection& n) { return projection(q, n, context); },
                          [&](const Aggregation& n) { return aggregation(q, n); },
                          [&](const UnionOf& n) { return union_of(q, n, context); },
                      },
                      q->node);
  }

  std::string id(const std::string& name) const { return quote_identifier(name, dialect_); }

  Cond condition(const Condition& c, const Compiled& rel, bool negated) {
    return std::visit(
        overloaded{
            [&](const Cmp& n) -> Cond { return maybe_negate(comparison(n, rel.header), negated); },
            [&](const Mapping& n) -> Cond {
              std::vector<std::string> terms;
              for (const auto& [key, value] : n.entries) {
                if (!rel.header.has(key)) continue;
                terms.push_back(is_null(value) ? id(key) + " IS NULL" : id(key) + " = " + sql_literal(value, dialect_));
              }
              if (terms.empty()) return {negated ? "1 = 0" : "1 = 1"};
              return maybe_negate({join_strings(terms, " AND ")}, negated);
            },
            [&](const OrList& n) -> Cond {
              if (n.items.empty()) return {negated ? "1 = 1" : "1 = 0"};
              std::vector<std::string> parts;
              for (const auto& item : n.items) parts.push_back(condition(item, rel, false).text);
              if (parts.size() == 1) return maybe_negate(condition(n.items[0], rel, false), negated);
              for (std::size_t i = 0; i < parts.size(); ++i) {
                if (parts[i].find(" AND ") != std::string::npos && !is_atomic(n.items[i])) parts[i] = "(" + parts[i] + ")";
              }
              return maybe_negate({join_strings(parts, "\n    OR "), true}, negated);
            },
            [&](const AndFn& n) -> Cond {
              if (n.items.empty()) return {negated ? "1 = 0" : "1 = 1"};
              std::vector<std::string> parts;
              for (const auto& item : n.items) {
                Cond part = condition(item, rel, false);
                parts.push_back(part.disjunction ? "(" + part.text + ")" : part.text);
              }
              return maybe_negate({join_strings(parts, "\n    AND ")}, negated);
            },
            [&](const NotFn& n) -> Cond { return condition(n.operand, rel, !negated); },
            [&](const SubqueryCond& n) -> Cond { return membership(n.query, rel, negated); },
        },
        c->node);
  }

 private:
  static bool is_atomic(const Condition& c) { return std::holds_alternative<SubqueryCond>(c->node); }

  static Cond maybe_negate(Cond c, bool negated) {
    if (!negated) return c;
    return {"(" + c.text + ") IS NOT TRUE"};
  }

  std::string alias() { return "t" + std::to_string(++aliases_); }

  std::string derived(const Compiled& c, const std::string& name) {
    return "(\n" + indent(render(c.sel), 4) + ") AS " + name;
  }

  // FROM fragment usable on either side of a natural join.
  std::string from_of(const Compiled& c) {
    if (c.sel.simple() && c.sel.where.empty() && c.sel.table) return c.sel.from;
    return derived(c, alias());
  }

  Compiled wrap(const Compiled& c) {
    Compiled out;
    out.header = c.header;
    out.columns = c.columns;
    out.sel.from = derived(c, alias());
    return out;
  }

  // Same rows with an explicit column list.
  Select with_columns(const Compiled& c, std::vector<std::string> cols) {
    Select s = c.sel.simple() ? c.sel : wrap(c).sel;
    s.cols = std::move(cols);
    return s;
  }

  bool needs_context(const Query& q) {
    const Header& h = analyzer_.header(q);
    return h.universal && !h.attrs.empty();
  }

  Compiled base(const Query& q, const BaseRef& n) {
    const EntitySetDef& def = catalog_.get(n.name);
    Compiled out;
    out.header = analyzer_.header(q);
    out.sel.from = id(sql_table_name(n.name));
    out.sel.table = true;
    if (def.primary_key.empty()) out.columns.push_back("_omega");
    for (const auto& a : def.attributes) out.columns.push_back(a.name);
    return out;
  }

  Compiled universal(const Query& q, const Universal& n, const Compiled* context) {
    Compiled out;
    out.header = analyzer_.header(q);
    if (n.attrs.empty()) {
      out.sel.cols = {"'1' AS _omega"};
      out.columns = {"_omega"};
      return out;
    }
    if (context == nullptr) {
      throw Error(ErrorCode::UniversalNotMaterializable,
                  "U(...) with attributes must be restricted by, joined with, or aggregated over an entity set");
    }
    std::vector<std::string> cols;
    for (const auto& a : n.attrs) {
      const Attribute* src = context->header.find(a);
      if (!src) throw Error(ErrorCode::UnknownAttribute, "universal attribute " + a + " has no counterpart");
      cols.push_back(id(a));
      out.columns.push_back(a);
      out.header.attrs[static_cast<std::size_t>(&a - n.attrs.data())].type = src->type;
    }
    out.sel = with_columns(*context, cols);
    out.sel.distinct = true;
    for (const auto& a : n.attrs) {
      if (!context->header.find(a)->primary) out.sel.add_where(id(a) + " IS NOT NULL");
    }
    return out;
  }

  Compiled restriction(const Query& q, const Restriction& n, const Compiled* context) {
    Compiled operand;
    const auto* sub = std::get_if<SubqueryCond>(&n.cond->node);
    if (needs_context(n.operand) && sub && n.polarity == Polarity::Restrict && !needs_context(sub->query)) {
      Compiled ctx = compile(sub->query);
      operand = compile(n.operand, &ctx);
    } else {
      operand = compile(n.operand, context);
    }
    Compiled out = operand.sel.simple() ? operand : wrap(operand);
    const Header& h = analyzer_.header(q);
    if (!h.universal) out.header = h;
    Cond c = condition(n.cond, out, n.polarity == Polarity::Exclude);
    out.sel.add_where(c.text, c.disjunction);
    return out;
  }

  Compiled join(const Query& q, const Join& n, const Compiled* context) {
    Compiled a;
    Compiled b;
    const bool ua = needs_context(n.left);
    const bool ub = needs_context(n.right);
    if (ua && ub) {
      if (context == nullptr) throw Error(ErrorCode::UniversalNotMaterializable, "join of two universal sets");
      a = compile(n.left, context);
      b = compile(n.right, context);
    } else if (ua) {
      b = compile(n.right, context);
      a = compile(n.left, &b);
    } else if (ub) {
      a = compile(n.left, context);
      b = compile(n.right, &a);
    } else {
      a = compile(n.left, context);
      b = compile(n.right, context);
    }
    Compiled out;
    out.header = analyzer_.header(q);
    const bool tables = a.sel.simple() && a.sel.where.empty() && a.sel.table && b.sel.simple() &&
                        b.sel.where.empty() && b.sel.table;
    out.sel.from = from_of(a) + "\nNATURAL JOIN " + from_of(b);
    out.sel.table = tables;
    out.columns = a.columns;
    for (const auto& c : b.columns) {
      if (std::find(out.columns.begin(), out.columns.end(), c) == out.columns.end()) out.columns.push_back(c);
    }
    if (out.header.universal) {
      out.header = a.header;
      for (const auto& y : b.header.attrs) {
        if (!out.header.has(y.name)) out.header.attrs.push_back(y);
      }
    }
    return out;
  }

  Resolver plain_resolver(const Header& h, const std::string& qualifier = "") {
    return [this, &h, qualifier](const std::string& name, bool) -> ScalarSql {
      const Attribute* a = h.find(name);
      if (!a) throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + name);
      return {qualifier.empty() ? id(name) : qualifier + "." + id(name), a->type};
    };
  }

  static const ProjItem* item_for(const std::vector<ProjItem>& items, const std::string& name) {
    const ProjItem* found = nullptr;
    for (const auto& item : items) {
      if (item.name == name && item.kind != ProjItem::Kind::Keep) found = &item;
    }
    return found;
  }

  Compiled projection(const Query& q, const Projection& n, const Compiled* context) {
    Compiled in = compile(n.operand, context);
    Compiled out;
    out.header = analyzer_.header(q);
    if (out.header.universal) {
      for (auto& attr : out.header.attrs) {
        if (const Attribute* c = in.header.find(attr.name); c && attr.wildcard) attr = *c;
      }
    }
    std::vector<std::string> cols;
    if (out.header.primary_count() == 0 && in.omega()) {
      cols.push_back("_omega");
      out.columns.push_back("_omega");
    }
    const Resolver resolve = plain_resolver(in.header);
    for (const auto& attr : out.header.attrs) {
      const ProjItem* item = item_for(n.items, attr.name);
      if (item && item->kind == ProjItem::Kind::Rename) {
        cols.push_back(id(item->source) + " AS " + id(attr.name));
      } else if (item) {
        cols.push_back(scalar(item->expr, resolve).text + " AS " + id(attr.name));
      } else {
        cols.push_back(id(attr.name));
      }
      out.columns.push_back(attr.name);
    }
    if (cols.empty()) cols.push_back("'1' AS _omega");
    out.sel = with_columns(in, std::move(cols));
    return out;
  }

  Compiled aggregation(const Query& q, const Aggregation& n) {
    Compiled b = compile(n.source);
    const bool universal_a = analyzer_.header(n.operand).universal;
    Compiled a = compile(n.operand, universal_a ? &b : nullptr);
    Compiled out;
    out.header = analyzer_.header(q);

    std::vector<std::string> on;
    for (const auto& name : homologous_namesakes(a.header, b.header)) {
      on.push_back("a." + id(name) + " = b." + id(name));
    }
    Select marked = with_columns(b, {"*", "1 AS _row"});
    Compiled b_marked;
    b_marked.sel = marked;
    std::string from = (a.sel.simple() && a.sel.where.empty() && a.sel.table && a.sel.from.find('\n') == std::string::npos
                            ? a.sel.from + " AS a"
                            : derived(a, "a"));
    from += universal_a ? "\nJOIN " : "\nLEFT JOIN ";
    from += derived(b_marked, "b");
    from += "\n    ON " + (on.empty() ? std::string("1 = 1") : join_strings(on, " AND "));

    const Header& ah = a.header;
    const Header& bh = b.header;
    Resolver resolve = [this, &ah, &bh](const std::string& name, bool in_call) -> ScalarSql {
      if (in_call) {
        if (const Attribute* x = bh.find(name)) return {"b." + id(name), x->type};
      }
      if (const Attribute* x = ah.find(name)) return {"a." + id(name), x->type};
      throw Error(ErrorCode::UnknownAttribute, "unknown attribute " + name);
    };

    std::vector<std::string> cols;
    if (out.header.primary_count() == 0) {
      cols.push_back(a.omega() ? "a._omega" : "'1' AS _omega");
      out.columns.push_back("_omega");
    }
    for (const auto& attr : out.header.attrs) {
      const ProjItem* item = item_for(n.items, attr.name);
      if (item && item->kind == ProjItem::Kind::Rename) {
        cols.push_back("a." + id(item->source) + " AS " + id(attr.name));
      } else if (item) {
        cols.push_back(scalar(item->expr, resolve).text + " AS " + id(attr.name));
      } else {
        cols.push_back("a." + id(attr.name));
      }
      out.columns.push_back(attr.name);
    }
    out.sel.cols = std::move(cols);
    out.sel.from = std::move(from);
    for (const auto& c : a.columns) out.sel.group.push_back("a." + id(c));
    return out;
  }

  Compiled union_of(const Query& q, const UnionOf& n, const Compiled* context) {
    Compiled a = compile(n.left, context);
    Compiled b = compile(n.right, context);
    Compiled out;
    out.header = analyzer_.header(q);
    if (out.header.universal) out.header = a.header;
    std::vector<std::string> cols;
    if (out.header.primary_count() == 0) {
      cols.push_back("_omega");
      out.columns.push_back("_omega");
    }
    for (const auto& attr : out.header.attrs) {
      cols.push_back(id(attr.name));
      out.columns.push_back(attr.name);
    }
    const std::string text =
        render(with_columns(a, cols)) + "\nUNION\n" + render(with_columns(b, cols));
    out.sel.from = "(\n" + indent(text, 4) + ") AS " + alias();
    return out;
  }

  // ---- conditions and scalars -----------------------------------------------

  Cond membership(const Query& sub_q, const Compiled& rel, bool negated) {
    Compiled sub = compile(sub_q, needs_context(sub_q) ? &rel : nullptr);
    std::vector<std::string> shared;
    bool nullable = false;
    for (const auto& y : sub.header.attrs) {
      const Attribute* x = rel.header.find(y.name);
      if (x && homologous(*x, y)) {
        shared.push_back(y.name);
        nullable = nullable || x->nullable || y.nullable;
      }
    }
    if (shared.empty()) {
      return {std::string(negated ? "NOT " : "") + "EXISTS (\n" + indent(render(sub.sel), 8) + ")"};
    }
    std::vector<std::string> cols;
    for (const auto& s : shared) cols.push_back(id(s));
    const std::string lhs = cols.size() == 1 ? cols[0] : "(" + join_strings(cols, ", ") + ")";
    const std::string body = "(\n" + indent(render(with_columns(sub, cols)), 8) + ")";
    if (!negated) return {lhs + " IN " + body};
    if (nullable) return {"(" + lhs + " IN " + body + ") IS NOT TRUE"};
    return {lhs + " NOT IN " + body};
  }

  std::string year_of(const std::string& text) const {
    if (dialect_ == Dialect::MySQL) return "YEAR(" + text + ")";
    return "CAST(SUBSTR(" + text + ", 1, 4) AS INTEGER)";
  }

  static bool datelike(const ScalarSql& s, const Scalar& node) {
    using K = Datatype::Kind;
    if (s.type.kind == K::Date || s.type.kind == K::Datetime) return true;
    if (const auto* l = std::get_if<Literal>(&node->node)) {
      const auto* str = std::get_if<std::string>(&l->value);
      return str && looks_like_date(*str);
    }
    return false;
  }

  Cond comparison(const Cmp& n, const Header& h) {
    const Resolver resolve = plain_resolver(h);
    ScalarSql lhs = scalar(n.lhs, resolve);
    if (n.op == CmpOp::In) {
      if (n.in_values.empty()) return {"1 = 0"};
      std::vector<std::string> values;
      for (const auto& v : n.in_values) values.push_back(sql_literal(v, dialect_));
      return {lhs.text + " IN (" + join_strings(values, ", ") + ")"};
    }
    ScalarSql rhs = scalar(n.rhs, resolve);
    if (lhs.type.is_integral() && datelike(rhs, n.rhs)) rhs.text = year_of(rhs.text);
    if (rhs.type.is_integral() && datelike(lhs, n.lhs)) lhs.text = year_of(lhs.text);
    std::string op;
    switch (n.op) {
      case CmpOp::Eq: op = "="; break;
      case CmpOp::Ne: op = "<>"; break;
      case CmpOp::Lt: op = "<"; break;
      case CmpOp::Le: op = "<="; break;
      case CmpOp::Gt: op = ">"; break;
      case CmpOp::Ge: op = ">="; break;
      case CmpOp::In: break;
    }
    return {lhs.text + " " + op + " " + rhs.text};
  }

  ScalarSql scalar(const Scalar& s, const Resolver& resolve, bool in_call = false) {
    using K = Datatype::Kind;
    return std::visit(
        overloaded{
            [&](const AttrRef& n) { return resolve(n.name, in_call); },
            [&](const Literal& n) -> ScalarSql {
              Datatype t = Datatype::of(K::Any);
              if (std::holds_alternative<std::int64_t>(n.value)) t = Datatype::of(K::Int);
              if (std::holds_alternative<double>(n.value)) t = Datatype::of(K::Double);
              if (std::holds_alternative<std::string>(n.value)) t = Datatype::of(K::Text);
              return {sql_literal(n.value, dialect_), t};
            },
            [&](const Negate& n) -> ScalarSql {
              ScalarSql x = scalar(n.operand, resolve, in_call);
              return {"-(" + x.text + ")", x.type};
            },
            [&](const Arith& n) -> ScalarSql {
              ScalarSql a = scalar(n.lhs, resolve, in_call);
              ScalarSql b = scalar(n.rhs, resolve, in_call);
              if (n.op == ArithOp::Add && a.type.is_textual() && b.type.is_textual()) {
                if (dialect_ == Dialect::MySQL) return {"CONCAT(" + a.text + ", " + b.text + ")", Datatype::of(K::Text)};
                return {"(" + a.text + " || " + b.text + ")", Datatype::of(K::Text)};
              }
              switch (n.op) {
                case ArithOp::Div: return {"(" + a.text + " * 1.0 / " + b.text + ")", Datatype::of(K::Double)};
                case ArithOp::Add:
                case ArithOp::Sub:
                case ArithOp::Mul: {
                  const char* op = n.op == ArithOp::Add ? " + " : n.op == ArithOp::Sub ? " - " : " * ";
                  const bool integral = a.type.is_integral() && b.type.is_integral();
                  return {"(" + a.text + op + b.text + ")", Datatype::of(integral ? K::Int : K::Double)};
                }
              }
              return {};
            },
            [&](const Call& n) -> ScalarSql {
              const std::string fn = n.fn;
              if (fn == "count") {
                if (n.args.empty()) return {"COUNT(b._row)", Datatype::of(K::Int)};
                return {"COUNT(" + scalar(n.args.back(), resolve, true).text + ")", Datatype::of(K::Int)};
              }
              ScalarSql arg = scalar(n.args.back(), resolve, true);
              const Datatype real = Datatype::of(K::Double);
              if (fn == "sum") return {"SUM(" + arg.text + ")", arg.type};
              if (fn == "min") return {"MIN(" + arg.text + ")", arg.type};
              if (fn == "max") return {"MAX(" + arg.text + ")", arg.type};
              if (fn == "avg") return {"AVG(" + arg.text + ")", real};
              if (fn == "stddev") return {"STDDEV_POP(" + arg.text + ")", real};
              if (fn == "var") return {"VAR_POP(" + arg.text + ")", real};
              std::string fraction = "0.5";
              if (fn == "percentile") {
                const Value p = std::get<Literal>(n.args.front()->node).value;
                fraction = format_double(as_double(p) / 100.0);
              }
              return {"PERCENTILE_CONT(" + fraction + ") WITHIN GROUP (ORDER BY " + arg.text + ")", real};
            },
        },
        s->node);
  }

  const Catalog& catalog_;
  Analyzer analyzer_;
  Dialect dialect_;
  int aliases_ = 0;
};

std::string terminate(std::string sql) { return sql + ";"; }

}  // namespace

std::string sql_table_name(const std::string& entity) {
  std::string out;
  for (char c : entity) {
    if (c == '.') {
      out += "__";
    } else {
      out += c;
    }
  }
  return out;
}

std::string quote_identifier(const std::string& name, Dialect dialect) {
  if (!reserved_words().count(upper(name))) return name;
  return dialect == Dialect::MySQL ? "`" + name + "`" : "\"" + name + "\"";
}

std::string sql_literal(const Value& v, Dialect dialect) {
  return std::visit(overloaded{
                        [](Null) -> std::string { return "NULL"; },
                        [](std::int64_t x) { return std::to_string(x); },
                        [](double x) {
                          std::string s = format_double(x);
                          if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
                          return s;
                        },
                        [dialect](const std::string& s) {
                          std::string out = "'";
                          for (char c : s) {
                            if (c == '\'') out += '\'';
                            if (c == '\\' && dialect == Dialect::MySQL) out += '\\';
                            out += c;
                          }
                          return out + "'";
                        },
                    },
                    v);
}

std::string ddl_to_sql(const Catalog& catalog, const std::string& entity, const SqlOptions& options) {
  const EntitySetDef& def = catalog.get(entity);
  const Dialect d = options.dialect;
  auto id = [d](const std::string& n) { return quote_identifier(n, d); };
  std::vector<std::string> lines;
  std::vector<std::string> notes;
  if (def.primary_key.empty()) lines.push_back("_omega CHAR(1) NOT NULL DEFAULT '1' CHECK (_omega = '1')");
  for (const auto& a : def.attributes) {
    std::string line = id(a.name) + " " + column_type(a.type, id(a.name), d);
    if (!a.nullable) line += " NOT NULL";
    if (a.default_value && !is_null(*a.default_value)) line += " DEFAULT " + sql_literal(*a.default_value, d);
    if (d == Dialect::MySQL && !a.comment.empty()) line += " COMMENT " + comment_literal(a.comment);
    lines.push_back(std::move(line));
  }
  std::vector<std::string> pk;
  for (const auto& k : def.primary_key) pk.push_back(id(k));
  if (pk.empty()) pk.push_back("_omega");
  lines.push_back("PRIMARY KEY (" + join_strings(pk, ", ") + ")");
  for (const auto& dep : def.dependencies) {
    std::vector<std::string> fk_cols;
    for (const auto& c : dep.fk_attrs) fk_cols.push_back(id(c));
    if (dep.is_union() || dep.is_restricted()) {
      notes.push_back("-- " + sql_table_name(entity) + " (" + join_strings(dep.fk_attrs, ", ") + ") references " +
                      to_source(dep.target) + "; enforced by the engine");
    } else if (dep.fk_attrs.empty()) {
      notes.push_back("-- " + sql_table_name(entity) + " depends on " + to_source(dep.target) +
                      ", which has no key attributes");
    } else {
      std::map<std::string, std::string> visible;
      for (const auto& c : dep.fk_attrs) visible[c] = c;
      std::vector<ForeignKey> fks;
      trace_keys(dep.target, catalog, visible, fks);
      for (const auto& fk : fks) {
        std::vector<std::string> local;
        std::vector<std::string> remote;
        for (const auto& c : fk.local) local.push_back(id(c));
        for (const auto& c : fk.remote) remote.push_back(id(c));
        std::string line = "FOREIGN KEY (" + join_strings(local, ", ") + ") REFERENCES " + id(sql_table_name(fk.table)) +
                           "(" + join_strings(remote, ", ") + ")";
        if (options.cascade) line += " ON DELETE CASCADE";
        lines.push_back(std::move(line));
      }
    }
    if (dep.unique && !fk_cols.empty()) lines.push_back("UNIQUE (" + join_strings(fk_cols, ", ") + ")");
  }
  std::string out;
  for (const auto& n : notes) out += n + "\n";
  out += "CREATE TABLE " + id(sql_table_name(entity)) + " (\n";
  for (std::size_t i = 0; i < lines.size(); ++i) out += "   " + lines[i] + (i + 1 < lines.size() ? ",\n" : ")");
  return terminate(out);
}

std::string schema_to_sql(const Catalog& catalog, const SqlOptions& options) {
  std::string out;
  for (const auto& name : topo_order(catalog)) {
    if (!out.empty()) out += "\n\n";
    out += ddl_to_sql(catalog, name, options);
  }
  return out;
}

std::string query_to_sql(const Catalog& catalog, const Query& q, const SqlOptions& options) {
  analyze(q, catalog);
  Compiler compiler(catalog, options.dialect);
  return terminate(render(compiler.compile(q).sel));
}

std::string manipulation_to_sql(const Catalog& catalog, const Manipulation& m, const SqlOptions& options) {
  const Dialect d = options.dialect;
  auto id = [d](const std::string& n) { return quote_identifier(n, d); };
  auto insert = [&](const InsertBlock& block) {
    const EntitySetDef& def = catalog.get(block.entity);
    std::vector<std::string> attrs = block.attrs;
    if (attrs.empty()) {
      for (const auto& a : def.attributes) attrs.push_back(a.name);
    }
    std::vector<std::string> cols;
    for (const auto& a : attrs) {
      if (!def.find(a)) throw Error(ErrorCode::UnknownAttribute, block.entity + " has no attribute " + a);
      cols.push_back(id(a));
    }
    std::vector<std::string> rows;
    for (const auto& r : block.rows) {
      std::vector<std::string> vals;
      for (const auto& v : r) vals.push_back(sql_literal(v, d));
      rows.push_back("(" + join_strings(vals, ", ") + ")");
    }
    return terminate("INSERT INTO " + id(sql_table_name(block.entity)) + " (" + join_strings(cols, ", ") +
                     ") VALUES\n   " + join_strings(rows, ",\n   "));
  };
  return std::visit(
      overloaded{
          [&](const Insert& n) -> std::string {
            if (catalog.get(n.main.entity).is_part) {
              throw Error(ErrorCode::PartDirectInsert, n.main.entity + " rows are inserted with their master");
            }
            if (n.parts.empty()) return insert(n.main);
            std::string out = d == Dialect::MySQL ? "START TRANSACTION;\n" : "BEGIN;\n";
            out += insert(n.main) + "\n";
            for (auto part : n.parts) {
              if (part.entity.find('.') == std::string::npos) part.entity = n.main.entity + "." + part.entity;
              out += insert(part) + "\n";
            }
            return out + "COMMIT;";
          },
          [&](const Delete& n) -> std::string {
            if (catalog.get(n.entity).is_part) {
              throw Error(ErrorCode::PartDirectDelete, n.entity + " rows are deleted through their master");
            }
            const Query q = restrict(base(n.entity), n.cond);
            analyze(q, catalog);
            Compiler compiler(catalog, d);
            Compiled rel;
            rel.header = catalog.get(n.entity).header();
            std::string where = compiler.condition(n.cond, rel, false).text;
            return terminate("DELETE FROM " + id(sql_table_name(n.entity)) + "\nWHERE " + where);
          },
          [&](const Update& n) -> std::string {
            const EntitySetDef& def = catalog.get(n.entity);
            std::vector<std::string> sets;
            for (const auto& [attr, value] : n.assignments) {
              const AttributeSpec* a = def.find(attr);
              if (!a) throw Error(ErrorCode::UnknownAttribute, n.entity + " has no attribute " + attr);
              if (a->primary) throw Error(ErrorCode::PrimaryKeyUpdate, attr + " is a primary attribute");
              if (a->foreign) throw Error(ErrorCode::ForeignKeyUpdate, attr + " is a foreign key attribute");
              sets.push_back(id(attr) + " = " + sql_literal(value, d));
            }
            const Query q = restrict(base(n.entity), n.cond);
            analyze(q, catalog);
            Compiler compiler(catalog, d);
            Compiled rel;
            rel.header = def.header();
            std::string where = compiler.condition(n.cond, rel, false).text;
            return terminate("UPDATE " + id(sql_table_name(n.entity)) + "\nSET " + join_strings(sets, ", ") +
                             "\nWHERE " + where);
          },
          [&](const Populate& n) -> std::string {
            catalog.get(n.entity);
            return "-- populate " + n.entity + " runs its make in the engine";
          },
      },
      m);
}

}  // namespace dj
