#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dj/value.hpp"

namespace dj {

/// Origin of an attribute: the entity set and attribute that first declared it,
/// plus a serial unique to the declaration event.
struct Lineage {
  std::string entity;
  std::string attr;
  std::uint64_t serial = 0;

  friend auto operator<=>(const Lineage&, const Lineage&) = default;
};

/// Sorted, duplicate-free. Unions merge the sets of their operands, so an
/// attribute may trace to more than one origin.
using LineageSet = std::vector<Lineage>;

std::uint64_t next_lineage_serial();
LineageSet merge(const LineageSet& a, const LineageSet& b);
bool intersects(const LineageSet& a, const LineageSet& b);

struct Attribute {
  std::string name;
  Datatype type;
  LineageSet lineage;
  bool primary = false;
  bool nullable = false;
  bool wildcard = false;  // universal-set attribute, matches any namesake
};

/// Two attributes are homologous when they trace to a common origin. Universal
/// attributes match anything.
bool homologous(const Attribute& a, const Attribute& b);

/// Static shape of a relation. Primary attributes always come first, so rows
/// sorted lexicographically are sorted by primary key.
struct Header {
  std::vector<Attribute> attrs;
  std::string entity_type;
  bool universal = false;

  std::optional<std::size_t> index_of(const std::string& name) const;
  const Attribute* find(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }
  std::size_t primary_count() const;
  std::vector<std::string> names() const;
  std::vector<std::string> primary_names() const;
  std::vector<std::string> secondary_names() const;
};

/// Names present in both headers whose attributes are homologous.
std::vector<std::string> homologous_namesakes(const Header& a, const Header& b);

/// Namesakes that are not homologous; empty means the headers are joinable.
std::vector<std::string> join_conflicts(const Header& a, const Header& b);
inline bool joinable(const Header& a, const Header& b) { return join_conflicts(a, b).empty(); }

}  // namespace dj
