#include "flowplace/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "flowplace/density.hpp"
#include "flowplace/wirelength.hpp"

namespace flowplace {

double penalty_at(PseudoKind kind, int iteration, const PlacerConfig& cfg) {
  const double k = iteration / cfg.penalty_iter_divisor;
  if (kind == PseudoKind::Datapath)
    return cfg.datapath_penalty_decay ? std::exp(-k) : 1.0;
  return std::exp(cfg.iter_0 - k);
}

double compute_bloat_factor(double core_area, double total_cluster_area) {
  if (total_cluster_area <= 0.0)
    throw std::invalid_argument("bloat factor: empty cluster set");
  return core_area / total_cluster_area;
}

double compute_shrink_factor(double target_overflow, double achieved_overflow) {
  if (achieved_overflow <= 0.0)
    throw std::invalid_argument("shrink factor: achieved overflow must be > 0");
  return target_overflow / achieved_overflow;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double gamma_of(double overflow_value, double bin_w) {
  const double t =
      (std::clamp(overflow_value, 0.0, 1.0) - 0.1) * (2.0 / 0.9) - 1.0;
  return std::clamp(8.0 * bin_w * std::pow(10.0, t), 0.8 * bin_w, 80.0 * bin_w);
}

double mu_of(double overflow_value, double stop_overflow) {
  const double m = std::pow(1.1, 1.0 - 2.0 * (overflow_value - stop_overflow));
  return std::clamp(m, 0.95, 1.1);
}

double norm2_delta(const Locations& a, const Locations& b,
                   std::span<const int> movables) {
  double s = 0.0;
  for (int v : movables) {
    const double dx = a.x[v] - b.x[v];
    const double dy = a.y[v] - b.y[v];
    s += dx * dx + dy * dy;
  }
  return std::sqrt(s);
}

double norm2_delta_force(const std::vector<double>& ax, const std::vector<double>& ay,
                         const std::vector<double>& bx, const std::vector<double>& by,
                         std::span<const int> movables) {
  double s = 0.0;
  for (int v : movables) {
    const double dx = ax[v] - bx[v];
    const double dy = ay[v] - by[v];
    s += dx * dx + dy * dy;
  }
  return std::sqrt(s);
}

}  // namespace

void clamp_into_core(const Netlist& netlist, Locations& locations) {
  const Rect& core = netlist.core();
  for (const Instance& inst : netlist.instances()) {
    if (!inst.movable()) continue;
    const double half_w = 0.5 * std::min(inst.width, core.width());
    const double half_h = 0.5 * std::min(inst.height, core.height());
    locations.x[inst.id] =
        std::clamp(locations.x[inst.id], core.lx + half_w, core.ux - half_w);
    locations.y[inst.id] =
        std::clamp(locations.y[inst.id], core.ly + half_h, core.uy - half_h);
  }
}

void apply_jitter(const Netlist& netlist, Locations& locations,
                  std::uint64_t seed, double amplitude) {
  // Kronecker sequence rotated by two seed-derived phases: low discrepancy,
  // reproducible, and distinct per instance.
  const double phi1 = 0.6180339887498949;   // 1/golden ratio
  const double phi2 = 0.7548776662466927;   // plastic-number companion
  const double s1 = (splitmix64(seed) >> 11) * 0x1.0p-53;
  const double s2 = (splitmix64(seed ^ 0xda3e39cb94b95bdbULL) >> 11) * 0x1.0p-53;
  for (const Instance& inst : netlist.instances()) {
    if (!inst.movable()) continue;
    const double u = std::fmod(s1 + inst.id * phi1, 1.0);
    const double v = std::fmod(s2 + inst.id * phi2, 1.0);
    locations.x[inst.id] += (u - 0.5) * amplitude;
    locations.y[inst.id] += (v - 0.5) * amplitude;
  }
  clamp_into_core(netlist, locations);
}

namespace {

// One gradient evaluation: weighted-average wirelength force plus
// lambda-scaled density force, preconditioned by the per-instance sum of
// incident net weights plus lambda * effective area.
struct Evaluator {
  const Netlist& netlist;
  const PlacerConfig& cfg;
  double grid_density;
  BinGrid grid;
  DepositScratch deposit_scratch;
  WaWorkspace wa;
  std::vector<double> weights;          // per net, effective at current iter
  std::vector<double> weight_sum;       // per instance, sum over incident pins
  std::vector<double> inst_area;        // effective area per instance
  std::vector<double> density_fx, density_fy;
  std::vector<int> movables;

  Evaluator(const Netlist& nl, const PseudoNetSet& pseudo, const PlacerConfig& c,
            double grid_target_density)
      : netlist(nl), cfg(c), grid_density(grid_target_density) {
    const int dim = auto_grid_dim(nl.num_movable());
    grid = BinGrid::make(nl.core(), dim, dim, grid_density);
    wa.resize(nl);
    weights.resize(nl.num_nets());
    for (const Net& net : nl.nets()) weights[net.id] = net.weight;
    weight_sum.assign(nl.num_instances(), 0.0);
    inst_area.resize(nl.num_instances());
    for (const Instance& inst : nl.instances()) {
      inst_area[inst.id] = effective_area(inst, grid_density);
      if (inst.movable()) movables.push_back(inst.id);
    }
    (void)pseudo;
  }

  void set_iteration_weights(const PseudoNetSet& pseudo, int iteration) {
    for (const auto& entry : pseudo.entries)
      weights[entry.net_id] =
          entry.base_weight * penalty_at(entry.kind, iteration, cfg);
    std::fill(weight_sum.begin(), weight_sum.end(), 0.0);
    for (const Pin& pin : netlist.pins())
      weight_sum[pin.instance] += weights[pin.net];
  }

  double deposit_overflow(const Locations& locs) {
    deposit_parallel(netlist, locs, grid, deposit_scratch);
    return overflow(grid);
  }

  // preconditioned total force into fx/fy; returns overflow at locs
  double eval(const Locations& locs, double gamma, double lambda,
              std::vector<double>& fx, std::vector<double>& fy) {
    wa_gradient_parallel(netlist, locs, gamma, wa, weights, cfg.ignore_net_degree);
    deposit_parallel(netlist, locs, grid, deposit_scratch);
    const double ovf = overflow(grid);
    solve_potential(grid);
    density_force(netlist, locs, grid, density_fx, density_fy);
    fx.assign(netlist.num_instances(), 0.0);
    fy.assign(netlist.num_instances(), 0.0);
    for (int v : movables) {
      const double h = weight_sum[v] + lambda * inst_area[v];
      if (h <= 0.0) continue;
      fx[v] = (wa.force_x[v] + lambda * density_fx[v]) / h;
      fy[v] = (wa.force_y[v] + lambda * density_fy[v]) / h;
    }
    return ovf;
  }

  // unpreconditioned L1 norms for the lambda balance at the start
  double initial_lambda(const Locations& locs, double gamma) {
    wa_gradient_parallel(netlist, locs, gamma, wa, weights, cfg.ignore_net_degree);
    deposit_parallel(netlist, locs, grid, deposit_scratch);
    solve_potential(grid);
    density_force(netlist, locs, grid, density_fx, density_fy);
    double wl = 0.0, dens = 0.0;
    for (int v : movables) {
      wl += std::abs(wa.force_x[v]) + std::abs(wa.force_y[v]);
      dens += std::abs(density_fx[v]) + std::abs(density_fy[v]);
    }
    if (dens <= 0.0) return 1.0;
    return wl / dens;
  }
};

}  // namespace

PlaceResult nesterov_place(const Netlist& netlist, const PseudoNetSet& pseudo,
                           const Locations& init_locations,
                           const PlacerConfig& cfg, const NesterovHooks& hooks) {
  PlaceResult result;
  result.locations = init_locations;
  if (netlist.num_movable() == 0) {
    result.converged = true;
    result.final_overflow = 0.0;
    return result;
  }
  if (init_locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument("nesterov_place: init location size mismatch");

  const double stop = hooks.stop_overflow_override >= 0.0
                          ? hooks.stop_overflow_override
                          : cfg.stop_overflow;
  const double grid_density = hooks.grid_target_density_override > 0.0
                                  ? hooks.grid_target_density_override
                                  : cfg.target_density;

  Evaluator ev(netlist, pseudo, cfg, grid_density);
  ev.set_iteration_weights(pseudo, 0);
  std::span<const int> movables(ev.movables);

  Locations v_prev = init_locations;
  clamp_into_core(netlist, v_prev);

  // schedules at the initial state
  const double overflow0 = ev.deposit_overflow(v_prev);
  double gamma = gamma_of(overflow0, ev.grid.bin_w);
  double lambda = ev.initial_lambda(v_prev, gamma);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) lambda = 1.0;

  std::vector<double> g_prev_x, g_prev_y, g_cur_x, g_cur_y, g_next_x, g_next_y;
  ev.eval(v_prev, gamma, lambda, g_prev_x, g_prev_y);

  // initial kick: a fixed fraction of a bin along the preconditioned force
  double ginf = 0.0;
  for (int v : movables)
    ginf = std::max({ginf, std::abs(g_prev_x[v]), std::abs(g_prev_y[v])});
  double step = ginf > 0.0 ? 0.1 * ev.grid.bin_w / ginf : ev.grid.bin_w;

  Locations v_cur = v_prev;
  for (int v : movables) {
    v_cur.x[v] = v_prev.x[v] + step * g_prev_x[v];
    v_cur.y[v] = v_prev.y[v] + step * g_prev_y[v];
  }
  clamp_into_core(netlist, v_cur);
  Locations u_cur = v_cur;
  Locations u_next = v_cur, v_next = v_cur;

  ev.eval(v_cur, gamma, lambda, g_cur_x, g_cur_y);

  double a_k = 1.0;
  double prev_overflow = overflow0;
  int divergence_run = 0;

  for (int k = 0; k < cfg.max_iterations; ++k) {
    ev.set_iteration_weights(pseudo, k);

    const double dv = norm2_delta(v_cur, v_prev, movables);
    const double dg = norm2_delta_force(g_cur_x, g_cur_y, g_prev_x, g_prev_y, movables);
    if (dg > 0.0 && dv > 0.0) step = dv / dg;

    double a_next = (1.0 + std::sqrt(4.0 * a_k * a_k + 1.0)) / 2.0;
    const double coef = (a_k - 1.0) / a_next;

    for (int bt = 0; bt < 8; ++bt) {
      for (int v : movables) {
        u_next.x[v] = v_cur.x[v] + step * g_cur_x[v];
        u_next.y[v] = v_cur.y[v] + step * g_cur_y[v];
      }
      clamp_into_core(netlist, u_next);
      for (int v : movables) {
        v_next.x[v] = u_next.x[v] + coef * (u_next.x[v] - u_cur.x[v]);
        v_next.y[v] = u_next.y[v] + coef * (u_next.y[v] - u_cur.y[v]);
      }
      clamp_into_core(netlist, v_next);
      ev.eval(v_next, gamma, lambda, g_next_x, g_next_y);
      const double dvn = norm2_delta(v_next, v_cur, movables);
      const double dgn =
          norm2_delta_force(g_next_x, g_next_y, g_cur_x, g_cur_y, movables);
      if (dgn <= 0.0 || dvn <= 0.0) break;
      const double step_hat = dvn / dgn;
      if (step_hat >= 0.95 * step) break;
      step *= 0.5;
    }

    v_prev = v_cur;
    v_cur = v_next;
    u_cur = u_next;
    g_prev_x.swap(g_cur_x);
    g_prev_y.swap(g_cur_y);
    g_cur_x.swap(g_next_x);
    g_cur_y.swap(g_next_y);
    a_k = a_next;

    const double ovf = ev.deposit_overflow(u_cur);
    const double wl = hpwl_design(netlist, u_cur);
    result.trace.push_back(TracePoint{k, ovf, wl, lambda, gamma,
                                      penalty_at(PseudoKind::Cluster, k, cfg), a_k,
                                      hooks.trace_phase});
    result.iterations = k + 1;

    if (hooks.snapshot && hooks.snapshot_every > 0 && (k % hooks.snapshot_every) == 0)
      hooks.snapshot(k, u_cur);

    if (ovf <= stop && k + 1 >= cfg.min_iterations) {
      result.converged = true;
      result.final_overflow = ovf;
      break;
    }
    if (ovf > 0.95 && ovf >= prev_overflow - 1e-12) {
      if (++divergence_run >= 100) {
        result.diverged = true;
        result.final_overflow = ovf;
        break;
      }
    } else {
      divergence_run = 0;
    }
    prev_overflow = ovf;
    result.final_overflow = ovf;

    gamma = gamma_of(ovf, ev.grid.bin_w);
    lambda *= mu_of(ovf, stop);
  }

  result.locations = u_cur;
  return result;
}

namespace {

// Cluster-level placement problem: soft square movables plus fixed terminal
// endpoints, bundled nets as flat nets.
Netlist make_cluster_netlist(const ClusteredNetlist& cnl,
                             std::span<const double> areas) {
  const Netlist& base = *cnl.origin;
  NetlistBuilder b;
  b.set_core(base.core());
  for (const Cluster& c : cnl.clusters) {
    const double side = std::sqrt(areas[c.id]);
    b.add_instance(c.label, side, side, InstKind::StdCell);
  }
  for (int term : cnl.terminal_endpoints) {
    const Instance& inst = base.instance(term);
    b.add_terminal(inst.name, inst.fixed_x, inst.fixed_y);
  }
  for (const BundledNet& bn : cnl.bundled) {
    const int net = b.add_net({}, bn.weight);
    for (int ep : bn.endpoints) b.connect(ep, net, 0.0, 0.0);
  }
  return b.build();
}

}  // namespace

ClusterPlaceResult place_clusters(const ClusteredNetlist& cnl,
                                  const PlacerConfig& cfg) {
  ClusterPlaceResult best;
  if (cnl.clusters.empty()) return best;
  const Rect& core = cnl.origin->core();

  std::vector<double> areas(cnl.clusters.size());
  double total = 0.0;
  for (const Cluster& c : cnl.clusters) total += c.total_area;
  const double bloat = compute_bloat_factor(core.area(), total);
  for (const Cluster& c : cnl.clusters) areas[c.id] = c.total_area * bloat;

  NesterovHooks hooks;
  hooks.stop_overflow_override = cfg.cluster_target_overflow;
  hooks.grid_target_density_override = 1.0;  // bloat fills the whole core
  hooks.trace_phase = 0;

  for (int attempt = 0; attempt < 4; ++attempt) {
    Netlist cluster_nl = make_cluster_netlist(cnl, areas);
    Locations init = initial_locations(cluster_nl);
    const double bin = core.width() / auto_grid_dim(cluster_nl.num_movable());
    apply_jitter(cluster_nl, init, cfg.seed + attempt, 0.01 * bin);

    PlaceResult res = nesterov_place(cluster_nl, PseudoNetSet{}, init, cfg, hooks);
    const bool better = best.attempts == 0 || res.final_overflow < best.final_overflow;
    if (better) {
      best.x.assign(cnl.num_clusters(), 0.0);
      best.y.assign(cnl.num_clusters(), 0.0);
      for (int c = 0; c < cnl.num_clusters(); ++c) {
        best.x[c] = res.locations.x[c];
        best.y[c] = res.locations.y[c];
      }
      best.final_overflow = res.final_overflow;
      best.trace = std::move(res.trace);
      best.hit_target = res.converged && !res.diverged;
    }
    best.attempts = attempt + 1;
    if (res.converged && !res.diverged &&
        res.final_overflow <= cfg.cluster_target_overflow)
      break;
    if (attempt == 3) {
      std::fprintf(stderr,
                   "flowplace: warning: cluster placement kept overflow %.3f "
                   "after %d attempts\n",
                   best.final_overflow, best.attempts);
      break;
    }
    const double shrink =
        compute_shrink_factor(cfg.cluster_target_overflow, res.final_overflow);
    for (double& a : areas) a *= shrink;
  }
  return best;
}

}  // namespace flowplace
