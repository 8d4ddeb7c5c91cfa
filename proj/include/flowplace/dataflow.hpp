#pragma once

#include <span>
#include <string>
#include <vector>

#include "flowplace/hierarchy.hpp"
#include "flowplace/netlist.hpp"

namespace flowplace {

// Register-hop dataflow between clusters. virtual_weight = info_flow / 2^hops.
struct DataflowEdge {
  int src_cluster = -1;
  int dst_cluster = -1;
  double info_flow = 0.0;  // distinct source registers reaching dst at min hops
  int num_hops = 0;
  double virtual_weight = 0.0;
};

// Forward traversal from every sequential instance of each cluster through
// combinational fanout; crossing into a sequential instance costs one hop.
// The first pin of a net is its driver. Edges beyond hop_limit are dropped.
// A combinational cycle is reported as a warning and does not hang the
// traversal.
std::vector<DataflowEdge> register_hop_bfs(const Netlist& netlist,
                                           std::span<const Cluster> clusters,
                                           int hop_limit = 4);

// Adds one two-endpoint virtual bundled net per edge; opposite directions
// stay separate and additive.
ClusteredNetlist inject_virtual_connections(ClusteredNetlist cnl,
                                            std::span<const DataflowEdge> edges);

void write_dataflow_dump(const std::vector<DataflowEdge>& edges,
                         std::span<const Cluster> clusters,
                         const std::string& path);

}  // namespace flowplace
