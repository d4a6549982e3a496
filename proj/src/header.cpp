#include "dj/header.hpp"

#include <algorithm>
#include <atomic>

namespace dj {

std::uint64_t next_lineage_serial() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

LineageSet merge(const LineageSet& a, const LineageSet& b) {
  LineageSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool intersects(const LineageSet& a, const LineageSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

bool homologous(const Attribute& a, const Attribute& b) {
  return a.wildcard || b.wildcard || intersects(a.lineage, b.lineage);
}

std::optional<std::size_t> Header::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == name) return i;
  }
  return std::nullopt;
}

const Attribute* Header::find(const std::string& name) const {
  auto i = index_of(name);
  return i ? &attrs[*i] : nullptr;
}

std::size_t Header::primary_count() const {
  return static_cast<std::size_t>(std::count_if(attrs.begin(), attrs.end(), [](const Attribute& a) { return a.primary; }));
}

std::vector<std::string> Header::names() const {
  std::vector<std::string> out;
  for (const auto& a : attrs) out.push_back(a.name);
  return out;
}

std::vector<std::string> Header::primary_names() const {
  std::vector<std::string> out;
  for (const auto& a : attrs) {
    if (a.primary) out.push_back(a.name);
  }
  return out;
}

std::vector<std::string> Header::secondary_names() const {
  std::vector<std::string> out;
  for (const auto& a : attrs) {
    if (!a.primary) out.push_back(a.name);
  }
  return out;
}

std::vector<std::string> homologous_namesakes(const Header& a, const Header& b) {
  std::vector<std::string> out;
  for (const auto& x : a.attrs) {
    if (const Attribute* y = b.find(x.name); y && homologous(x, *y)) out.push_back(x.name);
  }
  return out;
}

std::vector<std::string> join_conflicts(const Header& a, const Header& b) {
  std::vector<std::string> out;
  for (const auto& x : a.attrs) {
    if (const Attribute* y = b.find(x.name); y && !homologous(x, *y)) out.push_back(x.name);
  }
  return out;
}

}  // namespace dj
