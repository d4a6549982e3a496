#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dj/parser.hpp"
#include "dj/printer.hpp"
#include "dj/store.hpp"

namespace dj {

namespace {

using nlohmann::json;

constexpr const char* kManifest = "manifest.json";
constexpr const char* kNull = "\\N";

std::string file_name(const std::string& entity) { return entity + ".csv"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::PersistenceError, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::PersistenceError, "cannot write " + path.string());
  out << text;
}

std::string field_text(const Value& v) {
  if (is_null(v)) return kNull;
  if (const auto* s = std::get_if<std::string>(&v)) return csv_escape(*s);
  return format_value(v);
}

Value parse_field(const CsvField& f, const Datatype& type) {
  if (!f.quoted && f.text == kNull) return Null{};
  try {
    if (type.is_integral()) return std::int64_t{std::stoll(f.text)};
    if (type.is_real()) return std::stod(f.text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::PersistenceError, "malformed number '" + f.text + "' for " + to_string(type));
  }
  return f.text;
}

}  // namespace

std::string csv_escape(const std::string& field) {
  const bool plain = !field.empty() && field != kNull && field.find_first_of(",\"\r\n") == std::string::npos &&
                     field.front() != ' ' && field.back() != ' ';
  if (plain) return field;
  std::string r = "\"";
  for (char c : field) {
    if (c == '"') r += '"';
    r += c;
  }
  return r + "\"";
}

std::vector<std::vector<CsvField>> csv_parse(const std::string& text) {
  std::vector<std::vector<CsvField>> records;
  std::vector<CsvField> record;
  CsvField field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field.text += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        field.text += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      field.quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field = {};
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.text.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      field = {};
      record = {};
      any = false;
    } else {
      field.text += c;
      any = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::PersistenceError, "unterminated quoted CSV field");
  if (any || !field.text.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

void save_store(const std::filesystem::path& dir, const Store& store, const std::map<std::string, std::string>& makes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::PersistenceError, "cannot create " + dir.string() + ": " + ec.message());
  json manifest;
  manifest["format"] = "djengine-store";
  manifest["version"] = 1;
  manifest["generation"] = store.generation();
  manifest["entities"] = json::array();
  for (const auto& name : store.catalog().names()) {
    const EntitySetDef& def = store.catalog().get(name);
    manifest["entities"].push_back({{"name", name}, {"declaration", to_source(def.decl)}, {"file", file_name(name)}});
    const Relation& rel = store.base(name);
    std::string text;
    for (std::size_t i = 0; i < rel.header.attrs.size(); ++i) {
      if (i) text += ',';
      text += rel.header.attrs[i].name;
    }
    text += '\n';
    for (const auto& row : rel.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) text += ',';
        text += field_text(row[i]);
      }
      text += '\n';
    }
    write_file(dir / file_name(name), text);
  }
  manifest["makes"] = json::object();
  for (const auto& [entity, body] : makes) manifest["makes"][entity] = body;
  write_file(dir / kManifest, manifest.dump(2) + "\n");
}

SavedState load_store(const std::filesystem::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir / kManifest));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::PersistenceError, std::string("malformed manifest: ") + e.what());
  }
  SavedState state;
  try {
    if (manifest.value("format", "") != "djengine-store") {
      throw Error(ErrorCode::PersistenceError, "not a store manifest");
    }
    Store store;
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : manifest.at("entities")) {
      const auto statements = parse_script(e.at("declaration").get<std::string>());
      if (statements.size() != 1 || !std::holds_alternative<ast::EntityDecl>(statements[0].node)) {
        throw Error(ErrorCode::PersistenceError, "manifest entry is not one declaration");
      }
      store = store.declare(std::get<ast::EntityDecl>(statements[0].node));
      files.emplace_back(e.at("name").get<std::string>(), e.at("file").get<std::string>());
    }
    for (const auto& [name, file] : files) {
      const auto records = csv_parse(read_file(dir / file));
      const Header& header = store.base(name).header;
      const EntitySetDef& def = store.catalog().get(name);
      if (records.empty()) throw Error(ErrorCode::PersistenceError, file + " has no header line");
      std::vector<std::size_t> column;
      if (records[0].size() != header.attrs.size()) {
        throw Error(ErrorCode::PersistenceError, file + " header does not match " + name);
      }
      for (const auto& f : records[0]) {
        auto i = header.index_of(f.text);
        if (!i) throw Error(ErrorCode::PersistenceError, file + ": unknown column " + f.text);
        column.push_back(*i);
      }
      std::vector<Row> rows;
      for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != column.size()) {
          throw Error(ErrorCode::PersistenceError, file + ": record " + std::to_string(r) + " has wrong field count");
        }
        Row row(column.size());
        for (std::size_t c = 0; c < column.size(); ++c) {
          const AttributeSpec& spec = *def.find(header.attrs[column[c]].name);
          row[column[c]] = parse_field(records[r][c], spec.type);
          if (!is_null(row[column[c]])) row[column[c]] = conform(spec.type, row[column[c]]);
        }
        rows.push_back(std::move(row));
      }
      store = store.with_rows(name, std::move(rows));
    }
    if (auto problems = store.audit(); !problems.empty()) {
      throw Error(ErrorCode::PersistenceError, "loaded store fails audit: " + problems.front());
    }
    const json makes = manifest.value("makes", json::object());
    for (const auto& [entity, body] : makes.items()) {
      state.makes[entity] = body.get<std::string>();
    }
    state.store = store.with_generation(manifest.value("generation", std::uint64_t{0}));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::PersistenceError, std::string("malformed manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PersistenceError) throw;
    throw Error(ErrorCode::PersistenceError, "cannot load store: " + e.detail());
  }
  return state;
}

}  // namespace dj
