#include "dj/printer.hpp"

#include <sstream>

namespace dj {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using namespace ast;

// Query precedence levels, loosest first.
enum Level { kUnion = 0, kRestrict = 1, kJoin = 2, kPostfix = 3 };

int level_of(const Query& q) {
  return std::visit(overloaded{
                        [](const UnionOf&) { return int{kUnion}; },
                        [](const Restriction&) { return int{kRestrict}; },
                        [](const Join&) { return int{kJoin}; },
                        [](const auto&) { return int{kPostfix}; },
                    },
                    q->node);
}

int scalar_level(const Scalar& s) {
  if (const auto* a = std::get_if<Arith>(&s->node)) {
    return (a->op == ArithOp::Add || a->op == ArithOp::Sub) ? 1 : 2;
  }
  if (std::holds_alternative<Negate>(s->node)) return 3;
  return 4;
}

std::string print_scalar(const Scalar& s, int min_level) {
  std::string out = std::visit(
      overloaded{
          [](const AttrRef& n) { return n.name; },
          [](const Literal& n) { return literal_source(n.value); },
          [](const Arith& n) {
            const int lvl = (n.op == ArithOp::Add || n.op == ArithOp::Sub) ? 1 : 2;
            return print_scalar(n.lhs, lvl) + " " + std::string(to_string(n.op)) + " " + print_scalar(n.rhs, lvl + 1);
          },
          [](const Negate& n) {
            if (std::holds_alternative<Literal>(n.operand->node)) return "-(" + print_scalar(n.operand, 0) + ")";
            return "-" + print_scalar(n.operand, 3);
          },
          [](const Call& n) {
            std::string r = n.fn + "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (i) r += ", ";
              r += print_scalar(n.args[i], 0);
            }
            return r + ")";
          },
      },
      s->node);
  if (scalar_level(s) < min_level) return "(" + out + ")";
  return out;
}

std::string print_query(const Query& q, int min_level, bool tail);

// A condition written as the right operand of & or \. `tail` is false when
// more query text follows at this nesting depth (a union's `+`), in which case
// a comparison must be parenthesized so its right side does not absorb it.
std::string print_cond(const Condition& c, bool tail) {
  return std::visit(
      overloaded{
          [&](const Cmp& n) {
            std::string r = print_scalar(n.lhs, 1) + " " + std::string(to_string(n.op)) + " ";
            if (n.op == CmpOp::In) {
              r += "[";
              for (std::size_t i = 0; i < n.in_values.size(); ++i) {
                if (i) r += ", ";
                r += literal_source(n.in_values[i]);
              }
              r += "]";
            } else {
              r += print_scalar(n.rhs, 1);
            }
            return tail ? r : "(" + r + ")";
          },
          [](const Mapping& n) {
            std::string r = "{";
            for (std::size_t i = 0; i < n.entries.size(); ++i) {
              if (i) r += ", ";
              r += n.entries[i].first + ": " + literal_source(n.entries[i].second);
            }
            return r + "}";
          },
          [](const OrList& n) {
            std::string r = "[";
            for (std::size_t i = 0; i < n.items.size(); ++i) {
              if (i) r += ", ";
              r += print_cond(n.items[i], true);
            }
            return r + "]";
          },
          [](const AndFn& n) {
            std::string r = "And([";
            for (std::size_t i = 0; i < n.items.size(); ++i) {
              if (i) r += ", ";
              r += print_cond(n.items[i], true);
            }
            return r + "])";
          },
          [](const NotFn& n) { return "Not(" + print_cond(n.operand, true) + ")"; },
          [](const SubqueryCond& n) { return print_query(n.query, kJoin, true); },
      },
      c->node);
}

std::string print_items(const std::vector<ProjItem>& items, bool keeps_only, bool skip_keeps) {
  std::string r;
  for (const auto& item : items) {
    const bool is_keep = item.kind == ProjItem::Kind::Keep;
    if ((keeps_only && !is_keep) || (skip_keeps && is_keep)) continue;
    if (!r.empty()) r += ", ";
    switch (item.kind) {
      case ProjItem::Kind::Keep: r += item.name; break;
      case ProjItem::Kind::Rename: r += item.name + ": " + item.source; break;
      default: r += item.name + ": " + print_scalar(item.expr, 0); break;
    }
  }
  return r;
}

std::string print_query(const Query& q, int min_level, bool tail) {
  const bool parens = level_of(q) < min_level;
  if (parens) tail = true;
  std::string out = std::visit(
      overloaded{
          [](const BaseRef& n) { return n.name; },
          [&](const Restriction& n) {
            return print_query(n.operand, kRestrict, true) + (n.polarity == Polarity::Restrict ? " & " : " \\ ") +
                   print_cond(n.cond, tail);
          },
          [&](const Join& n) { return print_query(n.left, kJoin, false) + " * " + print_query(n.right, kPostfix, false); },
          [&](const UnionOf& n) { return print_query(n.left, kUnion, false) + " + " + print_query(n.right, kRestrict, tail); },
          [](const Projection& n) {
            std::string args = print_items(n.items, false, false);
            if (n.ellipsis) args += args.empty() ? "..." : ", ...";
            return print_query(n.operand, kPostfix, false) + ".proj(" + args + ")";
          },
          [](const Aggregation& n) {
            std::string args = print_items(n.items, true, false);
            if (!args.empty()) args += ", ";
            args += print_query(n.source, kUnion, true);
            const std::string rest = print_items(n.items, false, true);
            if (!rest.empty()) args += ", " + rest;
            if (n.ellipsis) args += ", ...";
            return print_query(n.operand, kPostfix, false) + ".aggr(" + args + ")";
          },
          [](const Universal& n) {
            std::string r = "U(";
            for (std::size_t i = 0; i < n.attrs.size(); ++i) {
              if (i) r += ", ";
              r += n.attrs[i];
            }
            return r + ")";
          },
      },
      q->node);
  return parens ? "(" + out + ")" : out;
}

std::string print_item(const DeclItem& item) {
  return std::visit(overloaded{
                        [](const AttrDecl& a) {
                          std::string r = a.name;
                          if (a.default_value) r += " = " + literal_source(*a.default_value);
                          r += " : " + to_string(a.type);
                          if (!a.comment.empty()) r += "  # " + a.comment;
                          return r;
                        },
                        [](const DependencyDecl& d) {
                          std::string r = "-> ";
                          if (d.unique || d.nullable) {
                            r += "[";
                            if (d.unique) r += "unique";
                            if (d.unique && d.nullable) r += ", ";
                            if (d.nullable) r += "nullable";
                            r += "] ";
                          }
                          r += d.is_master ? std::string("master") : to_source(d.target);
                          return r;
                        },
                    },
                    item);
}

}  // namespace

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::In: return "in";
  }
  return "?";
}

std::string_view to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

std::string literal_source(const Value& v) {
  switch (v.index()) {
    case 0: return "null";
    case 1: return std::to_string(std::get<1>(v));
    case 2: {
      std::string s = format_double(std::get<2>(v));
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    default: {
      std::string r = "\"";
      for (char c : std::get<3>(v)) {
        if (c == '"' || c == '\\') r += '\\';
        if (c == '\n') {
          r += "\\n";
          continue;
        }
        r += c;
      }
      return r + "\"";
    }
  }
}

std::string to_source(const Query& q) { return print_query(q, kUnion, true); }
std::string to_source(const Condition& c) { return print_cond(c, true); }
std::string to_source(const Scalar& s) { return print_scalar(s, 0); }

std::string to_source(const EntityDecl& decl) {
  std::ostringstream out;
  out << "::" << decl.name << "\n";
  for (const auto& item : decl.primary_items) out << print_item(item) << "\n";
  if (decl.has_divider || !decl.secondary_items.empty()) out << "---\n";
  for (const auto& item : decl.secondary_items) out << print_item(item) << "\n";
  return out.str();
}

}  // namespace dj
