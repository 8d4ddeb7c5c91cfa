#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowplace/hierarchy.hpp"
#include "flowplace/netlist.hpp"

namespace flowplace {

enum class PseudoKind : std::uint8_t { Cluster, Datapath };

// Star-decomposed constraint nets plus their penalty schedule inputs. The
// effective weight of a pseudo net at iteration k is
// base_weight * penalty_at(kind, k).
struct PseudoNetSet {
  struct Entry {
    int net_id = -1;
    PseudoKind kind = PseudoKind::Cluster;
    double base_weight = 1.0;
  };
  std::vector<Entry> entries;
  std::vector<int> star_centers;

  bool empty() const { return entries.empty(); }
};

struct PlacerConfig {
  double stop_overflow = 0.1;
  double cluster_target_overflow = 0.2;
  double target_density = 0.7;
  int iter_0 = 4;
  int max_iterations = 5000;
  long long ignore_net_degree = 1'000'000'000;  // none ignored
  std::uint64_t seed = 1;

  // engineering knobs
  int min_iterations = 50;            // overflow stop honored after this many
  double penalty_iter_divisor = 1.0;  // coarser-than-iteration decay if > 1
  bool datapath_penalty_decay = false;
  int min_cluster_size = 0;  // 0: 200 scaled by design size / 100k, >= 10
  int max_cluster_size = 0;  // 0: 4000 scaled likewise
  int hop_limit = 4;
};

// Cluster pseudo nets start at exp(iter_0) and decay by e every iteration;
// datapath pseudo nets hold at 1 (or decay from 1 when configured).
double penalty_at(PseudoKind kind, int iteration, const PlacerConfig& cfg);

struct TracePoint {
  int iter = 0;
  double overflow = 0.0;
  double hpwl = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double penalty_cluster = 0.0;
  double momentum = 1.0;  // a_k
  int phase = 1;          // 0 = cluster placement, 1 = flat placement
};

struct PlaceResult {
  Locations locations;
  std::vector<TracePoint> trace;
  bool converged = false;
  bool diverged = false;
  double final_overflow = 1.0;
  int iterations = 0;
};

struct NesterovHooks {
  std::function<void(int iteration, const Locations&)> snapshot;
  int snapshot_every = 0;
  double stop_overflow_override = -1.0;        // < 0: use cfg.stop_overflow
  double grid_target_density_override = -1.0;  // < 0: use cfg.target_density
  int trace_phase = 1;
};

// Nesterov iteration on wirelength + lambda * density with inverse-Lipschitz
// steps and halving backtracking. Terminates at the overflow stop (after
// min_iterations), the iteration cap, or the divergence detector.
PlaceResult nesterov_place(const Netlist& netlist, const PseudoNetSet& pseudo,
                           const Locations& init_locations,
                           const PlacerConfig& cfg,
                           const NesterovHooks& hooks = {});

double compute_bloat_factor(double core_area, double total_cluster_area);
double compute_shrink_factor(double target_overflow, double achieved_overflow);

struct ClusterPlaceResult {
  std::vector<double> x, y;  // placed center per cluster id
  double final_overflow = 1.0;
  int attempts = 0;
  bool hit_target = false;
  std::vector<TracePoint> trace;
};

// Clusters as bloated soft square movables (Eq. of bloat above), placed to
// the cluster overflow target; shrinks and retries up to 3 times on a miss,
// keeping the best attempt.
ClusterPlaceResult place_clusters(const ClusteredNetlist& cnl,
                                  const PlacerConfig& cfg);

// Deterministic low-discrepancy jitter, at most amplitude/2 per axis.
void apply_jitter(const Netlist& netlist, Locations& locations,
                  std::uint64_t seed, double amplitude);

void clamp_into_core(const Netlist& netlist, Locations& locations);

}  // namespace flowplace
