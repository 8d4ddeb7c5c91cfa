#include "flowplace/hierarchy.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>

namespace flowplace {

namespace {

struct PrefixNode {
  std::map<std::string, PrefixNode> children;
  std::vector<int> direct;  // instances whose leaf name lives at this node
  int subtree_size = 0;

  void collect(std::vector<int>& out) const {
    out.insert(out.end(), direct.begin(), direct.end());
    for (const auto& [name, child] : children) child.collect(out);
  }
};

Cluster make_cluster(const Netlist& netlist, std::string label,
                     std::vector<int> members) {
  Cluster c;
  c.label = std::move(label);
  std::sort(members.begin(), members.end());
  c.members = std::move(members);
  for (int id : c.members) {
    const Instance& inst = netlist.instance(id);
    c.total_area += inst.area();
    if (inst.kind == InstKind::Macro) c.contains_macro = true;
  }
  return c;
}

// ceil(size / max_size) consecutive slices in ascending instance-id order
void emit_slices(const Netlist& netlist, const std::string& prefix,
                 std::vector<int> members, int max_size,
                 std::vector<Cluster>& out) {
  std::sort(members.begin(), members.end());
  if (static_cast<int>(members.size()) <= max_size) {
    out.push_back(make_cluster(netlist, prefix, std::move(members)));
    return;
  }
  const int n = static_cast<int>(members.size());
  const int pieces = (n + max_size - 1) / max_size;
  for (int k = 0; k < pieces; ++k) {
    const int lo = k * max_size;
    const int hi = std::min(n, lo + max_size);
    out.push_back(make_cluster(netlist, prefix + ":" + std::to_string(k),
                               {members.begin() + lo, members.begin() + hi}));
  }
}

void merge_undersized_siblings(std::vector<Cluster>& group, int min_size) {
  while (group.size() > 1) {
    // smallest cluster, label as tie-break
    auto smallest = group.begin();
    for (auto it = group.begin() + 1; it != group.end(); ++it)
      if (it->size() < smallest->size() ||
          (it->size() == smallest->size() && it->label < smallest->label))
        smallest = it;
    if (smallest->size() >= min_size) break;
    // merge it into the smallest *other* sibling
    auto target = group.end();
    for (auto it = group.begin(); it != group.end(); ++it) {
      if (it == smallest) continue;
      if (target == group.end() || it->size() < target->size() ||
          (it->size() == target->size() && it->label < target->label))
        target = it;
    }
    target->members.insert(target->members.end(), smallest->members.begin(),
                           smallest->members.end());
    std::sort(target->members.begin(), target->members.end());
    target->total_area += smallest->total_area;
    target->contains_macro = target->contains_macro || smallest->contains_macro;
    group.erase(smallest);
  }
}

}  // namespace

std::vector<Cluster> extract_hierarchy(const Netlist& netlist, int min_size,
                                       int max_size) {
  if (min_size < 1 || min_size > max_size)
    throw std::invalid_argument("extract_hierarchy: need 1 <= min_size <= max_size");

  PrefixNode root;
  bool any_hierarchy = false;
  for (const Instance& inst : netlist.instances()) {
    if (!inst.movable()) continue;
    PrefixNode* node = &root;
    ++node->subtree_size;
    std::string_view rest = inst.name;
    for (std::size_t slash = rest.find('/'); slash != std::string_view::npos;
         slash = rest.find('/')) {
      node = &node->children[std::string(rest.substr(0, slash))];
      ++node->subtree_size;
      rest = rest.substr(slash + 1);
      any_hierarchy = true;
    }
    node->direct.push_back(inst.id);
  }
  if (root.subtree_size == 0) return {};
  if (!any_hierarchy)
    std::fprintf(stderr,
                 "flowplace: warning: flat instance names, falling back to "
                 "index-sliced clustering\n");

  std::vector<Cluster> clusters;
  struct QueueItem {
    const PrefixNode* node;
    std::string prefix;
  };
  std::deque<QueueItem> queue;
  queue.push_back({&root, ""});

  while (!queue.empty()) {
    const QueueItem item = queue.front();
    queue.pop_front();
    std::vector<Cluster> siblings;

    for (const auto& [name, child] : item.node->children) {
      const std::string prefix =
          item.prefix.empty() ? name : item.prefix + "/" + name;
      if (child.subtree_size <= max_size) {
        std::vector<int> members;
        child.collect(members);
        siblings.push_back(make_cluster(netlist, prefix, std::move(members)));
      } else if (!child.children.empty()) {
        queue.push_back({&child, prefix});
      } else {
        emit_slices(netlist, prefix, child.direct, max_size, siblings);
      }
    }
    // direct members of a split prefix form its residual group
    if (!item.node->direct.empty()) {
      const std::string label = item.prefix.empty() ? "<top>" : item.prefix;
      emit_slices(netlist, label, item.node->direct, max_size, siblings);
    }

    merge_undersized_siblings(siblings, min_size);
    for (Cluster& c : siblings) clusters.push_back(std::move(c));
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.label < b.label; });
  for (std::size_t i = 0; i < clusters.size(); ++i)
    clusters[i].id = static_cast<int>(i);
  return clusters;
}

ClusteredNetlist build_clustered_netlist(const Netlist& netlist,
                                         std::vector<Cluster> clusters) {
  ClusteredNetlist cnl;
  cnl.origin = &netlist;
  cnl.clusters = std::move(clusters);
  cnl.cluster_of.assign(netlist.num_instances(), -1);
  for (const Cluster& c : cnl.clusters)
    for (int id : c.members) {
      if (cnl.cluster_of[id] != -1)
        throw std::invalid_argument("clusters overlap at instance " +
                                    netlist.instance(id).name);
      cnl.cluster_of[id] = c.id;
    }
  std::vector<int> terminal_index(netlist.num_instances(), -1);
  for (const Instance& inst : netlist.instances()) {
    if (inst.kind == InstKind::Terminal) {
      terminal_index[inst.id] = static_cast<int>(cnl.terminal_endpoints.size());
      cnl.terminal_endpoints.push_back(inst.id);
    } else if (cnl.cluster_of[inst.id] == -1) {
      throw std::invalid_argument("movable instance not covered by clusters: " +
                                  inst.name);
    }
  }

  std::map<std::vector<int>, double> bundles;
  std::vector<int> endpoints;
  for (const Net& net : netlist.nets()) {
    if (net.is_pseudo) continue;
    endpoints.clear();
    for (int pid : net.pin_ids) {
      const int inst = netlist.pin(pid).instance;
      const int ep = cnl.cluster_of[inst] != -1
                         ? cnl.cluster_of[inst]
                         : cnl.num_clusters() + terminal_index[inst];
      endpoints.push_back(ep);
    }
    std::sort(endpoints.begin(), endpoints.end());
    endpoints.erase(std::unique(endpoints.begin(), endpoints.end()),
                    endpoints.end());
    if (endpoints.size() < 2) continue;  // intra-cluster net
    bundles[endpoints] += 1.0;
  }
  cnl.bundled.reserve(bundles.size());
  for (auto& [eps, weight] : bundles)
    cnl.bundled.push_back(BundledNet{eps, weight, false});
  return cnl;
}

void write_cluster_dump(const ClusteredNetlist& cnl, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const Cluster& c : cnl.clusters) {
    out << c.id << ' ' << c.label << ' ' << c.size() << '\n';
    for (int id : c.members) out << "  " << cnl.origin->instance(id).name << '\n';
  }
}

}  // namespace flowplace
