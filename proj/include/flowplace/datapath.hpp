#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowplace/hierarchy.hpp"
#include "flowplace/netlist.hpp"

namespace flowplace {

// A bit stack local to one cluster: instances named `<base>[<bit>]` sharing
// the base and the cluster, at least two of them.
struct AlignmentGroup {
  int cluster = -1;
  std::string base_name;
  std::vector<int> members;  // sorted by bit index (ties by id)
  std::vector<int> bits;
};

// Splits a name into `base[bit]`; nullopt when the suffix is not a bracketed
// nonnegative integer.
std::optional<std::pair<std::string_view, int>> split_bit_index(
    std::string_view name);

// Groups bracket-indexed instances by (cluster, base). The same base in two
// clusters yields two groups; singletons are dropped; duplicate bit indices
// are kept with a warning.
std::vector<AlignmentGroup> extract_alignment_groups(
    const Netlist& netlist, std::span<const Cluster> clusters);

void write_group_dump(const std::vector<AlignmentGroup>& groups,
                      const Netlist& netlist, const std::string& path);

}  // namespace flowplace
