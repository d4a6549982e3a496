#include "dj/diagram.hpp"

#include <set>
#include <sstream>

#include "dj/printer.hpp"

namespace dj {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

struct Edge {
  std::string from;
  std::string to;
  std::string attrs;
};

// Nodes the target resolves to: base sets directly, or a derived node that
// stands for a projection or union.
struct Targets {
  std::vector<std::string> bases;
  std::vector<ast::Query> derived;
};

void collect(const ast::Query& q, Targets& out) {
  std::visit(overloaded{
                 [&](const ast::BaseRef& b) { out.bases.push_back(b.name); },
                 [&](const ast::Restriction& r) { collect(r.operand, out); },
                 [&](const ast::Join& j) {
                   collect(j.left, out);
                   collect(j.right, out);
                 },
                 [&](const ast::Projection&) { out.derived.push_back(q); },
                 [&](const ast::UnionOf&) { out.derived.push_back(q); },
                 [&](const ast::Aggregation&) { out.derived.push_back(q); },
                 [&](const ast::Universal&) {},
             },
             q->node);
}

void bases_of(const ast::Query& q, std::vector<std::string>& out) {
  std::visit(overloaded{
                 [&](const ast::BaseRef& b) { out.push_back(b.name); },
                 [&](const ast::Restriction& r) { bases_of(r.operand, out); },
                 [&](const ast::Join& j) {
                   bases_of(j.left, out);
                   bases_of(j.right, out);
                 },
                 [&](const ast::Projection& p) { bases_of(p.operand, out); },
                 [&](const ast::UnionOf& u) {
                   bases_of(u.left, out);
                   bases_of(u.right, out);
                 },
                 [&](const ast::Aggregation& a) {
                   bases_of(a.operand, out);
                   bases_of(a.source, out);
                 },
                 [&](const ast::Universal&) {},
             },
             q->node);
}

}  // namespace

std::string emit_dot(const Catalog& catalog) {
  std::ostringstream out;
  out << "digraph schema {\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=box, fontname=\"Helvetica\"];\n";
  out << "  edge [arrowhead=none];\n";
  for (const auto& name : catalog.names()) {
    const auto& def = catalog.get(name);
    out << "  " << quoted(name) << (def.is_part ? " [shape=plaintext];\n" : ";\n");
  }

  std::vector<std::string> derived_nodes;
  std::vector<Edge> edges;
  std::set<std::pair<std::string, std::string>> drawn;
  auto add = [&](const std::string& from, const std::string& to, const std::string& attrs) {
    if (drawn.insert({from, to}).second) edges.push_back({from, to, attrs});
  };

  for (const auto& name : catalog.names()) {
    const auto& def = catalog.get(name);
    const bool same_key = def.distinguishing_attributes().empty() && def.primary_dependencies().size() == 1;
    // primary dependencies first so a pair drawn twice keeps the solid style
    for (const bool primary : {true, false}) {
      std::size_t k = 0;
      for (const auto& dep : def.dependencies) {
        ++k;
        if (dep.primary != primary) continue;
        Targets targets;
        collect(dep.target, targets);
        const std::string style = primary ? "style=solid" : "style=dashed";
        for (const auto& base : targets.bases) {
          const bool thick = primary && same_key && targets.bases.size() == 1 && targets.derived.empty();
          add(name, base, thick ? style + ", penwidth=3" : style);
        }
        std::size_t j = 0;
        for (const auto& q : targets.derived) {
          const std::string node = name + "~" + std::to_string(k) + (targets.derived.size() > 1 ? "." + std::to_string(++j) : "");
          derived_nodes.push_back(quoted(node) + " [shape=plaintext, fontcolor=orange, label=" + quoted(to_source(q)) + "]");
          add(name, node, style);
          std::vector<std::string> under;
          bases_of(q, under);
          for (const auto& base : under) add(node, base, "style=solid, color=orange");
        }
      }
    }
  }

  for (const auto& n : derived_nodes) out << "  " << n << ";\n";
  for (const auto& e : edges) out << "  " << quoted(e.from) << " -> " << quoted(e.to) << " [" << e.attrs << "];\n";
  out << "}\n";
  return out.str();
}

}  // namespace dj
