#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "flowplace/hierarchy.hpp"
#include "flowplace/netlist.hpp"
#include "flowplace/optimizer.hpp"

namespace flowplace {

struct DgFlags {
  bool use_dataflow = true;
  bool use_datapath = true;
};

struct DgResult {
  Locations locations;  // sized to the input netlist
  std::vector<TracePoint> trace;
  std::vector<Cluster> clusters;
  bool converged = false;
  bool diverged = false;
  double final_overflow = 1.0;
  double final_hpwl = 0.0;
  int flat_iterations = 0;
  int cluster_attempts = 0;
  // stage wall times in seconds
  double time_extract = 0.0;
  double time_cluster_place = 0.0;
  double time_flat_place = 0.0;
};

// Full flow: hierarchy extraction, dataflow virtual connections, cluster
// placement, cluster-center seeding with pseudo-net constraints, flat
// mixed-size placement. With both flags off, a plain analytical placement
// from the core center (the unconstrained baseline).
DgResult dg_place(const Netlist& netlist, const PlacerConfig& cfg, DgFlags flags,
                  const NesterovHooks& hooks = {});

// Effective cluster-size bounds for a design: configured values, or the
// full-scale defaults (200 / 4000) scaled by design size over 100k, never
// below 10.
std::pair<int, int> effective_cluster_bounds(const Netlist& netlist,
                                             const PlacerConfig& cfg);

// Root-mean-square distance of instances from their cluster centroid.
double intra_cluster_rms_spread(const Netlist& netlist,
                                std::span<const Cluster> clusters,
                                const Locations& locations);

void write_trace_csv(std::span<const TracePoint> trace,
                     const std::filesystem::path& path);

// Cluster-colored layout snapshot: one rectangle per instance plus the core
// outline. cluster_of may be empty (uncolored).
void write_svg(const Netlist& netlist, const Locations& locations,
               std::span<const int> cluster_of,
               const std::filesystem::path& path);

}  // namespace flowplace
