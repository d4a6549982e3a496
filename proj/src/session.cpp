#include "dj/session.hpp"

#include "dj/parser.hpp"
#include "dj/printer.hpp"

namespace dj {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string plural(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

}  // namespace

ast::Query Session::resolve(const ast::Query& q) const {
  return ast::substitute(q, [this](const std::string& name) -> ast::Query {
    if (store_.catalog().contains(name)) return nullptr;
    auto it = variables_.find(name);
    if (it != variables_.end()) return it->second;
    if (!name.empty() && std::islower(static_cast<unsigned char>(name.front()))) {
      throw Error(ErrorCode::UnknownVariable, "unknown variable " + name);
    }
    return nullptr;
  });
}

ast::Condition Session::resolve(const ast::Condition& c) const {
  ast::Query wrapped = resolve(ast::restrict(ast::universal({}), c));
  return std::get<ast::Restriction>(wrapped->node).cond;
}

void Session::define_make(const std::string& entity, const std::string& body_source) {
  const EntitySetDef& def = store_.catalog().get(entity);
  ast::Query body = resolve(parse_query(body_source));
  analyze(body, store_.catalog());
  makes_.add(def.name, declarative_make(def.name, body));
  make_sources_[def.name] = body_source;
}

Outcome Session::execute(const ast::Statement& statement) {
  Outcome out;
  out.text = statement.text;
  std::visit(
      overloaded{
          [&](const ast::EntityDecl& decl) {
            store_ = store_.declare(decl);
            out.kind = Outcome::Kind::Declared;
            out.message = "declared " + decl.name;
          },
          [&](const ast::Manipulation& m) {
            std::visit(overloaded{
                           [&](const ast::Insert& ins) {
                             const bool master = !ins.parts.empty() || !store_.catalog().parts_of(ins.main.entity).empty();
                             store_ = master ? store_.insert_master(ins.main, ins.parts) : store_.insert(ins.main);
                             std::size_t n = ins.main.rows.size();
                             for (const auto& p : ins.parts) n += p.rows.size();
                             out.kind = Outcome::Kind::Inserted;
                             out.message = "inserted " + plural(n, "row") + " into " + ins.main.entity;
                           },
                           [&](const ast::Delete& d) {
                             auto [next, report] = store_.remove(d.entity, resolve(d.cond));
                             store_ = std::move(next);
                             out.kind = Outcome::Kind::Deleted;
                             out.message = "deleted " + plural(report.total(), "row");
                             std::string detail;
                             for (const auto& [name, count] : report.counts) {
                               if (count == 0) continue;
                               detail += (detail.empty() ? "" : ", ") + name + ": " + std::to_string(count);
                             }
                             if (!detail.empty()) out.message += " (" + detail + ")";
                           },
                           [&](const ast::Update& u) {
                             const std::size_t before = eval_restrict(store_.base(u.entity), resolve(u.cond),
                                                                      ast::Polarity::Restrict, store_)
                                                            .size();
                             store_ = store_.update(u.entity, resolve(u.cond), u.assignments);
                             out.kind = Outcome::Kind::Updated;
                             out.message = "updated " + plural(before, "row") + " in " + u.entity;
                           },
                           [&](const ast::Populate& p) {
                             auto [next, report] = populate(store_, p.entity, makes_.get(p.entity));
                             store_ = std::move(next);
                             out.kind = Outcome::Kind::Populated;
                             out.message = "populated " + p.entity + ": made " + plural(report.made, "key") + ", " +
                                           std::to_string(report.errors.size()) + " errors";
                             for (const auto& [key, message] : report.errors) out.message += "\n  " + message;
                           },
                       },
                       m);
          },
          [&](const ast::Query& q) {
            out.kind = Outcome::Kind::Queried;
            out.query = resolve(q);
            out.result = eval(out.query, store_);
          },
          [&](const ast::Assignment& a) {
            if (store_.catalog().contains(a.name)) {
              throw Error(ErrorCode::DuplicateEntityName, a.name + " names an entity set");
            }
            ast::Query resolved = resolve(a.expr);
            analyze(resolved, store_.catalog());
            variables_[a.name] = resolved;
            out.kind = Outcome::Kind::Assigned;
            out.query = resolved;
            out.message = a.name + " = " + to_source(resolved);
          },
          [&](const ast::MakeDecl& m) {
            define_make(m.entity, to_source(m.body));
            out.kind = Outcome::Kind::MakeDefined;
            out.message = "make defined for " + m.entity;
          },
      },
      statement.node);
  return out;
}

std::vector<Outcome> Session::run(std::string_view script) {
  std::vector<Outcome> outcomes;
  for (const auto& st : parse_script(script)) outcomes.push_back(execute(st));
  return outcomes;
}

Relation Session::query(std::string_view text) { return eval(resolve(parse_query(text)), store_); }

}  // namespace dj
