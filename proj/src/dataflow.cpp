#include "flowplace/dataflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <omp.h>

namespace flowplace {

namespace {

// Per-thread traversal scratch with epoch stamping so the arrays are cleared
// in O(1) between sources.
struct BfsScratch {
  std::vector<int> comb_stamp, seq_stamp;
  std::vector<int> frontier, next_frontier, comb_stack;
  int epoch = 0;

  void resize(int n) {
    comb_stamp.assign(n, -1);
    seq_stamp.assign(n, -1);
    epoch = 0;
  }
};

void warn_on_combinational_cycles(const Netlist& netlist,
                                  std::span<const int> driven_first,
                                  std::span<const int> driven_nets) {
  const int nv = netlist.num_instances();
  std::vector<int> indeg(nv, 0);
  for (const Net& net : netlist.nets()) {
    if (net.is_pseudo || net.degree() < 2) continue;
    const Instance& driver = netlist.instance(netlist.pin(net.pin_ids[0]).instance);
    if (driver.is_sequential || driver.kind == InstKind::Terminal) continue;
    for (std::size_t s = 1; s < net.pin_ids.size(); ++s) {
      const Instance& sink = netlist.instance(netlist.pin(net.pin_ids[s]).instance);
      if (!sink.is_sequential && sink.kind != InstKind::Terminal) ++indeg[sink.id];
    }
  }
  std::vector<int> queue;
  int comb_count = 0;
  for (const Instance& inst : netlist.instances()) {
    if (inst.is_sequential || inst.kind == InstKind::Terminal) continue;
    ++comb_count;
    if (indeg[inst.id] == 0) queue.push_back(inst.id);
  }
  int processed = 0;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    ++processed;
    for (int d = driven_first[v]; d < driven_first[v + 1]; ++d) {
      const Net& net = netlist.net(driven_nets[d]);
      for (std::size_t s = 1; s < net.pin_ids.size(); ++s) {
        const Instance& sink =
            netlist.instance(netlist.pin(net.pin_ids[s]).instance);
        if (sink.is_sequential || sink.kind == InstKind::Terminal) continue;
        if (--indeg[sink.id] == 0) queue.push_back(sink.id);
      }
    }
  }
  if (processed < comb_count)
    std::fprintf(stderr,
                 "flowplace: warning: combinational cycle detected (%d cells in "
                 "cycles); hop traversal still terminates\n",
                 comb_count - processed);
}

}  // namespace

std::vector<DataflowEdge> register_hop_bfs(const Netlist& netlist,
                                           std::span<const Cluster> clusters,
                                           int hop_limit) {
  if (hop_limit < 1) throw std::invalid_argument("register_hop_bfs: hop_limit >= 1");
  const int nv = netlist.num_instances();
  const int nc = static_cast<int>(clusters.size());

  std::vector<int> cluster_of(nv, -1);
  for (const Cluster& c : clusters)
    for (int id : c.members) cluster_of[id] = c.id;

  // CSR of nets driven by each instance (driver = first pin of the net)
  std::vector<int> driven_first(nv + 1, 0);
  for (const Net& net : netlist.nets()) {
    if (net.is_pseudo || net.degree() < 2) continue;
    ++driven_first[netlist.pin(net.pin_ids[0]).instance + 1];
  }
  for (int v = 0; v < nv; ++v) driven_first[v + 1] += driven_first[v];
  std::vector<int> driven_nets(driven_first[nv]);
  {
    std::vector<int> cursor(driven_first.begin(), driven_first.end() - 1);
    for (const Net& net : netlist.nets()) {
      if (net.is_pseudo || net.degree() < 2) continue;
      driven_nets[cursor[netlist.pin(net.pin_ids[0]).instance]++] = net.id;
    }
  }

  warn_on_combinational_cycles(netlist, driven_first, driven_nets);

  // per-cluster result slots; sources within a cluster are walked in
  // ascending id, so the merge is deterministic for any worker count
  std::vector<std::vector<DataflowEdge>> slots(nc);

#pragma omp parallel
  {
    BfsScratch scratch;
    scratch.resize(nv);
    std::vector<int> best_hops(nc, std::numeric_limits<int>::max());
    std::vector<int> best_count(nc, 0);
    std::vector<int> src_stamp(nc, -1), src_dist(nc, 0);
    std::vector<int> touched, src_touched;

#pragma omp for schedule(dynamic)
    for (int a = 0; a < nc; ++a) {
      std::fill(best_hops.begin(), best_hops.end(), std::numeric_limits<int>::max());
      std::fill(best_count.begin(), best_count.end(), 0);
      touched.clear();

      for (int source : clusters[a].members) {
        if (!netlist.instance(source).is_sequential) continue;
        ++scratch.epoch;
        src_touched.clear();
        scratch.frontier.clear();
        scratch.frontier.push_back(source);
        scratch.seq_stamp[source] = scratch.epoch;

        for (int hop = 0; hop < hop_limit && !scratch.frontier.empty(); ++hop) {
          scratch.next_frontier.clear();
          scratch.comb_stack = scratch.frontier;
          while (!scratch.comb_stack.empty()) {
            const int v = scratch.comb_stack.back();
            scratch.comb_stack.pop_back();
            for (int d = driven_first[v]; d < driven_first[v + 1]; ++d) {
              const Net& net = netlist.net(driven_nets[d]);
              for (std::size_t s = 1; s < net.pin_ids.size(); ++s) {
                const int sink = netlist.pin(net.pin_ids[s]).instance;
                const Instance& si = netlist.instance(sink);
                if (si.kind == InstKind::Terminal) continue;
                if (si.is_sequential) {
                  if (scratch.seq_stamp[sink] == scratch.epoch) continue;
                  scratch.seq_stamp[sink] = scratch.epoch;
                  scratch.next_frontier.push_back(sink);
                  const int b = cluster_of[sink];
                  // first arrival per source and cluster is the per-source
                  // shortest distance (BFS level order)
                  if (b >= 0 && b != a && src_stamp[b] != scratch.epoch) {
                    src_stamp[b] = scratch.epoch;
                    src_dist[b] = hop + 1;
                    src_touched.push_back(b);
                  }
                } else {
                  if (scratch.comb_stamp[sink] == scratch.epoch) continue;
                  scratch.comb_stamp[sink] = scratch.epoch;
                  scratch.comb_stack.push_back(sink);
                }
              }
            }
          }
          scratch.frontier.swap(scratch.next_frontier);
        }

        for (int b : src_touched) {
          if (src_dist[b] < best_hops[b]) {
            if (best_hops[b] == std::numeric_limits<int>::max()) touched.push_back(b);
            best_hops[b] = src_dist[b];
            best_count[b] = 1;
          } else if (src_dist[b] == best_hops[b]) {
            ++best_count[b];
          }
        }
      }

      std::sort(touched.begin(), touched.end());
      for (int b : touched)
        slots[a].push_back(DataflowEdge{a, b, static_cast<double>(best_count[b]),
                                        best_hops[b],
                                        best_count[b] / std::exp2(best_hops[b])});
    }
  }

  std::vector<DataflowEdge> edges;
  for (auto& slot : slots)
    edges.insert(edges.end(), slot.begin(), slot.end());
  return edges;
}

ClusteredNetlist inject_virtual_connections(ClusteredNetlist cnl,
                                            std::span<const DataflowEdge> edges) {
  for (const DataflowEdge& e : edges) {
    if (e.src_cluster < 0 || e.src_cluster >= cnl.num_clusters() ||
        e.dst_cluster < 0 || e.dst_cluster >= cnl.num_clusters())
      throw std::invalid_argument("inject_virtual_connections: bad cluster id");
    std::vector<int> eps{e.src_cluster, e.dst_cluster};
    std::sort(eps.begin(), eps.end());
    cnl.bundled.push_back(BundledNet{std::move(eps), e.virtual_weight, true});
  }
  return cnl;
}

void write_dataflow_dump(const std::vector<DataflowEdge>& edges,
                         std::span<const Cluster> clusters,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const DataflowEdge& e : edges)
    out << clusters[e.src_cluster].label << ' ' << clusters[e.dst_cluster].label
        << ' ' << e.info_flow << ' ' << e.num_hops << ' ' << e.virtual_weight
        << '\n';
}

}  // namespace flowplace
