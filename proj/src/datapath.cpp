#include "flowplace/datapath.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace flowplace {

std::optional<std::pair<std::string_view, int>> split_bit_index(
    std::string_view name) {
  if (name.size() < 3 || name.back() != ']') return std::nullopt;
  const std::size_t open = name.rfind('[');
  if (open == std::string_view::npos || open + 2 > name.size() - 1) return std::nullopt;
  int bit = 0;
  for (std::size_t i = open + 1; i + 1 < name.size(); ++i) {
    const char c = name[i];
    if (c < '0' || c > '9') return std::nullopt;
    bit = bit * 10 + (c - '0');
  }
  return std::make_pair(name.substr(0, open), bit);
}

std::vector<AlignmentGroup> extract_alignment_groups(
    const Netlist& netlist, std::span<const Cluster> clusters) {
  std::map<std::pair<int, std::string>, AlignmentGroup> groups;
  for (const Cluster& cluster : clusters) {
    for (int id : cluster.members) {
      const auto split = split_bit_index(netlist.instance(id).name);
      if (!split) continue;  // non-indexed names stay ungrouped
      auto key = std::make_pair(cluster.id, std::string(split->first));
      AlignmentGroup& g = groups[key];
      g.cluster = cluster.id;
      g.base_name = key.second;
      g.members.push_back(id);
      g.bits.push_back(split->second);
    }
  }

  std::vector<AlignmentGroup> out;
  for (auto& [key, g] : groups) {
    if (g.members.size() < 2) continue;  // singletons are not groups
    std::vector<std::size_t> order(g.members.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (g.bits[a] != g.bits[b]) return g.bits[a] < g.bits[b];
      return g.members[a] < g.members[b];
    });
    AlignmentGroup sorted;
    sorted.cluster = g.cluster;
    sorted.base_name = g.base_name;
    for (std::size_t i : order) {
      sorted.members.push_back(g.members[i]);
      sorted.bits.push_back(g.bits[i]);
    }
    for (std::size_t i = 1; i < sorted.bits.size(); ++i)
      if (sorted.bits[i] == sorted.bits[i - 1]) {
        std::fprintf(stderr,
                     "flowplace: warning: duplicate bit index %d in group '%s'\n",
                     sorted.bits[i], sorted.base_name.c_str());
        break;
      }
    out.push_back(std::move(sorted));
  }
  return out;
}

void write_group_dump(const std::vector<AlignmentGroup>& groups,
                      const Netlist& netlist, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const AlignmentGroup& g = groups[i];
    out << i << ' ' << g.base_name << ' ' << g.members.size() << '\n';
    for (int id : g.members) out << "  " << netlist.instance(id).name << '\n';
  }
}

}  // namespace flowplace
