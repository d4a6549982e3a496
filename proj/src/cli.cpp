#include "dj/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dj/diagram.hpp"
#include "dj/parser.hpp"
#include "dj/printer.hpp"
#include "dj/session.hpp"
#include "dj/transpile.hpp"

namespace dj::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Format { Table, Csv, Json };

struct Options {
  std::string store_dir;
  Format format = Format::Table;
  Dialect dialect = Dialect::MySQL;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Session open_session(const Options& opt) {
  if (opt.store_dir.empty() || !fs::exists(fs::path(opt.store_dir) / "manifest.json")) return Session{};
  SavedState saved = load_store(opt.store_dir);
  Session session(std::move(saved.store));
  for (const auto& [entity, body] : saved.makes) session.define_make(entity, body);
  return session;
}

void save_session(const Options& opt, const Session& session) {
  if (!opt.store_dir.empty()) save_store(opt.store_dir, session.store(), session.make_sources());
}

// Display order: primary key first, then the remaining attributes.
std::vector<const Row*> display_order(const Relation& r) {
  std::vector<const Row*> rows;
  for (const auto& row : r.rows) rows.push_back(&row);
  std::sort(rows.begin(), rows.end(), [](const Row* a, const Row* b) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      const auto c = compare_values((*a)[i], (*b)[i]);
      if (c != 0) return c < 0;
    }
    return false;
  });
  return rows;
}

void print_table(std::ostream& out, const Relation& r) {
  const auto& attrs = r.header.attrs;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width;
  for (const auto& a : attrs) width.push_back(a.name.size());
  for (const Row* row : display_order(r)) {
    std::vector<std::string> line;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      line.push_back(format_value((*row)[i], attrs[i].type));
      width[i] = std::max(width[i], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  std::vector<bool> numeric;
  for (const auto& a : attrs) numeric.push_back(a.type.is_numeric());
  auto emit = [&](const std::vector<std::string>& line, bool heading = false) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) text += " | ";
      const std::string pad(width[i] - line[i].size(), ' ');
      text += numeric[i] && !heading ? pad + line[i] : line[i] + pad;
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  };
  std::vector<std::string> names;
  for (const auto& a : attrs) names.push_back(a.primary ? "*" + a.name : a.name);
  for (std::size_t i = 0; i < names.size(); ++i) width[i] = std::max(width[i], names[i].size());
  emit(names, true);
  std::string rule;
  for (std::size_t i = 0; i < width.size(); ++i) rule += (i ? "-+-" : "") + std::string(width[i], '-');
  out << rule << '\n';
  for (const auto& line : cells) emit(line);
  out << "(" << r.size() << (r.size() == 1 ? " row)\n" : " rows)\n");
}

void print_csv(std::ostream& out, const Relation& r) {
  const auto& attrs = r.header.attrs;
  for (std::size_t i = 0; i < attrs.size(); ++i) out << (i ? "," : "") << csv_escape(attrs[i].name);
  out << '\n';
  for (const Row* row : display_order(r)) {
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      out << (i ? "," : "");
      if (!is_null((*row)[i])) out << csv_escape(format_value((*row)[i], attrs[i].type));
    }
    out << '\n';
  }
}

void print_json(std::ostream& out, const Relation& r) {
  json doc;
  doc["header"] = r.header.names();
  doc["rows"] = json::array();
  for (const Row* row : display_order(r)) {
    json line = json::array();
    for (const auto& v : *row) {
      std::visit([&](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Null>) {
          line.push_back(nullptr);
        } else {
          line.push_back(x);
        }
      }, v);
    }
    doc["rows"].push_back(std::move(line));
  }
  out << doc.dump() << '\n';
}

void print_result(std::ostream& out, const Relation& r, Format f) {
  switch (f) {
    case Format::Table: print_table(out, r); break;
    case Format::Csv: print_csv(out, r); break;
    case Format::Json: print_json(out, r); break;
  }
}

void report(const Outcome& o, const Options& opt, std::ostream& out, std::ostream& err) {
  if (o.kind == Outcome::Kind::Queried) {
    print_result(out, *o.result, opt.format);
  } else if (!o.message.empty()) {
    (opt.format == Format::Table ? out : err) << o.message << '\n';
  }
}

/// Runs every statement; stops at the first error.
void run_script(Session& session, const std::string& source, const Options& opt, std::ostream& out, std::ostream& err) {
  for (const auto& st : parse_script(source)) report(session.execute(st), opt, out, err);
}

void describe(const Session& session, const std::string& name, std::ostream& out) {
  const auto& catalog = session.store().catalog();
  if (name.empty()) {
    for (const auto& n : catalog.names()) out << n << '\n';
    return;
  }
  out << to_source(catalog.get(name).decl) << '\n';
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// Statements are evaluated as soon as the buffer parses; declarations wait
// for a blank line since any prefix of one is itself a declaration.
int repl(Session& session, const Options& opt, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string buffer;
  std::string line;
  auto flush = [&] {
    if (trim(buffer).empty()) {
      buffer.clear();
      return;
    }
    try {
      run_script(session, buffer, opt, out, err);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
    }
    buffer.clear();
  };
  out << "dj> " << std::flush;
  while (std::getline(in, line)) {
    const std::string cmd = trim(line);
    if (buffer.empty() && starts_with(cmd, "\\")) {
      if (cmd == "\\q") break;
      if (cmd == "\\d" || starts_with(cmd, "\\d ")) {
        try {
          describe(session, trim(cmd.substr(2)), out);
        } catch (const Error& e) {
          err << "error: " << e.what() << '\n';
        }
      } else {
        err << "error: unknown command " << cmd << '\n';
      }
    } else if (cmd.empty()) {
      flush();
    } else {
      buffer += line + '\n';
      if (!starts_with(trim(buffer), "::")) {
        try {
          parse_script(buffer);
          flush();
        } catch (const Error& e) {
          const std::string msg = e.what();
          if (msg.find("end of input") == std::string::npos) {
            err << "error: " << msg << '\n';
            buffer.clear();
          }
        }
      }
    }
    out << (buffer.empty() ? "dj> " : "... ") << std::flush;
  }
  flush();
  out << '\n';
  save_session(opt, session);
  return 0;
}

void emit_sql(Session& session, const std::string& source, const Options& opt, std::ostream& out) {
  const SqlOptions sql{opt.dialect, true};
  for (const auto& st : parse_script(source)) {
    const Outcome o = session.execute(st);
    const auto& catalog = session.store().catalog();
    std::visit([&](const auto& node) {
      using T = std::decay_t<decltype(node)>;
      if constexpr (std::is_same_v<T, ast::EntityDecl>) {
        out << ddl_to_sql(catalog, node.name, sql) << "\n\n";
      } else if constexpr (std::is_same_v<T, ast::Manipulation>) {
        out << manipulation_to_sql(catalog, node, sql) << "\n\n";
      } else if constexpr (std::is_same_v<T, ast::Query>) {
        out << query_to_sql(catalog, o.query, sql) << "\n\n";
      }
    }, st.node);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"DataJoint relational data model engine", "djengine"};
  app.require_subcommand(1);
  Options opt;
  std::string format = "table";
  std::string dialect = "mysql";
  app.add_option("--store", opt.store_dir, "Directory holding a persistent session")->type_name("DIR");
  app.add_option("--format", format, "Query output format")->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("--dialect", dialect, "SQL dialect")->check(CLI::IsMember({"generic", "mysql"}));

  std::string script;
  std::string output;
  std::string dir;
  std::string entity;
  std::vector<std::string> scripts;

  auto* run_cmd = app.add_subcommand("run", "Execute a script and print query results");
  run_cmd->add_option("script", script)->required();
  app.add_subcommand("repl", "Interactive session (\\d [Entity] describes, \\q quits)");
  auto* sql_cmd = app.add_subcommand("sql", "Translate a script to SQL");
  sql_cmd->add_option("script", script)->required();
  auto* diagram_cmd = app.add_subcommand("diagram", "Schema diagram in DOT");
  diagram_cmd->add_option("script", script);
  diagram_cmd->add_option("-o,--output", output, "Write DOT to a file");
  auto* dump_cmd = app.add_subcommand("dump", "Save the session, after running scripts, as CSV plus manifest");
  dump_cmd->add_option("dir", dir)->required();
  dump_cmd->add_option("scripts", scripts);
  auto* load_cmd = app.add_subcommand("load", "Check a saved store and adopt it as the session store");
  load_cmd->add_option("dir", dir)->required();
  auto* populate_cmd = app.add_subcommand("populate", "Run the make of a computed entity set");
  populate_cmd->add_option("entity", entity)->required();
  populate_cmd->add_option("scripts", scripts, "Scripts run before populating");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }
  opt.format = format == "csv" ? Format::Csv : format == "json" ? Format::Json : Format::Table;
  opt.dialect = dialect == "generic" ? Dialect::Generic : Dialect::MySQL;

  try {
    Session session = open_session(opt);
    if (*run_cmd) {
      const std::string source = read_file(script);
      run_script(session, source, opt, out, err);
      save_session(opt, session);
    } else if (app.got_subcommand("repl")) {
      return repl(session, opt, in, out, err);
    } else if (*sql_cmd) {
      const std::string source = read_file(script);
      if (!session.store().catalog().names().empty()) out << schema_to_sql(session.store().catalog(), {opt.dialect, true});
      emit_sql(session, source, opt, out);
    } else if (*diagram_cmd) {
      if (!script.empty()) {
        for (const auto& st : parse_script(read_file(script))) {
          if (std::holds_alternative<ast::EntityDecl>(st.node)) session.execute(st);
        }
      }
      const std::string dot = emit_dot(session.store().catalog());
      if (output.empty()) {
        out << dot;
      } else {
        std::ofstream file(output);
        if (!(file << dot)) throw UsageError("cannot write " + output);
      }
    } else if (*dump_cmd) {
      for (const auto& s : scripts) run_script(session, read_file(s), opt, out, err);
      save_store(dir, session.store(), session.make_sources());
      std::size_t rows = 0;
      for (const auto& name : session.store().catalog().names()) rows += session.store().base(name).size();
      out << "saved " << rows << " rows in " << session.store().catalog().size() << " entity sets to " << dir << '\n';
    } else if (*load_cmd) {
      SavedState saved = load_store(dir);
      for (const auto& name : saved.store.catalog().names()) {
        out << name << ": " << saved.store.base(name).size() << '\n';
      }
      if (!opt.store_dir.empty()) save_store(opt.store_dir, saved.store, saved.makes);
    } else if (*populate_cmd) {
      for (const auto& s : scripts) run_script(session, read_file(s), opt, out, err);
      report(session.execute(parse_script("populate " + entity).at(0)), opt, out, err);
      save_session(opt, session);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dj::cli
