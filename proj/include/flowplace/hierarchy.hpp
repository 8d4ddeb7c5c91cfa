#pragma once

#include <string>
#include <vector>

#include "flowplace/netlist.hpp"

namespace flowplace {

struct Cluster {
  int id = -1;
  std::string label;               // representative hierarchy prefix
  std::vector<int> members;        // movable instance ids, ascending
  double total_area = 0.0;
  bool contains_macro = false;

  int size() const { return static_cast<int>(members.size()); }
};

// Bundled connection between clusters (and terminal endpoints).
struct BundledNet {
  std::vector<int> endpoints;  // endpoint ids, ascending
  double weight = 0.0;         // number of collapsed flat nets, or a virtual weight
  bool virtual_edge = false;   // injected dataflow connection
};

// Cluster-level view of a flat netlist. Endpoint ids 0..num_clusters-1 are
// clusters; ids >= num_clusters are fixed per-terminal singletons.
struct ClusteredNetlist {
  const Netlist* origin = nullptr;
  std::vector<Cluster> clusters;
  std::vector<int> terminal_endpoints;  // terminal instance id per endpoint slot
  std::vector<BundledNet> bundled;
  std::vector<int> cluster_of;  // per instance: cluster id, -1 for terminals

  int num_clusters() const { return static_cast<int>(clusters.size()); }
  int terminal_endpoint(int terminal_index) const {
    return num_clusters() + terminal_index;
  }
};

// Breadth-first clustering of the name-prefix tree: prefixes whose subtree
// fits max_size become clusters, larger ones recurse, oversized leaf groups
// are sliced by instance-id order, and undersized siblings merge until the
// lower bound holds (at most one undersized residual per parent). Flat names
// degrade to pure index slicing.
std::vector<Cluster> extract_hierarchy(const Netlist& netlist, int min_size,
                                       int max_size);

ClusteredNetlist build_clustered_netlist(const Netlist& netlist,
                                         std::vector<Cluster> clusters);

// Optional dump for harnesses: `<cluster_id> <label> <size>` then one member
// name per line.
void write_cluster_dump(const ClusteredNetlist& cnl, const std::string& path);

}  // namespace flowplace
