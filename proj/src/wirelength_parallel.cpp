#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "flowplace/wirelength.hpp"

namespace flowplace {

namespace {

inline double net_weight_of(const Net& net, std::span<const double> net_weights) {
  return net_weights.empty() ? net.weight : net_weights[net.id];
}

inline bool net_active(const Net& net, long long ignore_net_degree) {
  return net.degree() >= 2 && net.degree() <= ignore_net_degree;
}

}  // namespace

// Phase structure:
//   1. per net:      extremal coordinates, zero b/c accumulators
//   2. per pin:      shifted exponentials a_p
//   3. per net:      b/c sums over own pins in ascending pin-id order
//   4. per pin:      weighted analytic gradient
//   5. per instance: force accumulation over own pins in ascending pin-id order
// Every loop iteration writes only slots it owns, so no atomics are needed
// and the result does not depend on the number of workers.
void wa_gradient_parallel(const Netlist& netlist, const Locations& locations,
                          double gamma, WaWorkspace& ws,
                          std::span<const double> net_weights,
                          long long ignore_net_degree) {
  if (gamma <= 0.0)
    throw std::invalid_argument("wa_gradient_parallel: gamma must be > 0");
  if (locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument(
        "wa_gradient_parallel: location vector length mismatch");
  if (!ws.sized_for(netlist))
    throw std::invalid_argument("wa_gradient_parallel: workspace size mismatch");

  const double inv_gamma = 1.0 / gamma;
  const auto& nets = netlist.nets();
  const auto& pins = netlist.pins();
  const auto& instances = netlist.instances();
  const int num_nets = netlist.num_nets();
  const int num_pins = netlist.num_pins();
  const int num_instances = netlist.num_instances();

#pragma omp parallel for schedule(static)
  for (int e = 0; e < num_nets; ++e) {
    const Net& net = nets[e];
    ws.b_max_x[e] = 0.0;
    ws.b_min_x[e] = 0.0;
    ws.b_max_y[e] = 0.0;
    ws.b_min_y[e] = 0.0;
    ws.c_max_x[e] = 0.0;
    ws.c_min_x[e] = 0.0;
    ws.c_max_y[e] = 0.0;
    ws.c_min_y[e] = 0.0;
    if (!net_active(net, ignore_net_degree)) {
      ws.net_max_x[e] = 0.0;
      ws.net_min_x[e] = 0.0;
      ws.net_max_y[e] = 0.0;
      ws.net_min_y[e] = 0.0;
      continue;
    }
    double max_x = -std::numeric_limits<double>::infinity();
    double min_x = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    for (int pid : net.pin_ids) {
      const double px = netlist.pin_x(pid, locations);
      const double py = netlist.pin_y(pid, locations);
      max_x = std::max(max_x, px);
      min_x = std::min(min_x, px);
      max_y = std::max(max_y, py);
      min_y = std::min(min_y, py);
    }
    ws.net_max_x[e] = max_x;
    ws.net_min_x[e] = min_x;
    ws.net_max_y[e] = max_y;
    ws.net_min_y[e] = min_y;
  }

#pragma omp parallel for schedule(static)
  for (int p = 0; p < num_pins; ++p) {
    const int e = pins[p].net;
    if (!net_active(nets[e], ignore_net_degree)) {
      ws.a_max_x[p] = 0.0;
      ws.a_min_x[p] = 0.0;
      ws.a_max_y[p] = 0.0;
      ws.a_min_y[p] = 0.0;
      continue;
    }
    const double px = netlist.pin_x(p, locations);
    const double py = netlist.pin_y(p, locations);
    ws.a_max_x[p] = std::exp((px - ws.net_max_x[e]) * inv_gamma);
    ws.a_min_x[p] = std::exp((ws.net_min_x[e] - px) * inv_gamma);
    ws.a_max_y[p] = std::exp((py - ws.net_max_y[e]) * inv_gamma);
    ws.a_min_y[p] = std::exp((ws.net_min_y[e] - py) * inv_gamma);
  }

#pragma omp parallel for schedule(static)
  for (int e = 0; e < num_nets; ++e) {
    const Net& net = nets[e];
    if (!net_active(net, ignore_net_degree)) continue;
    double bpx = 0.0, bmx = 0.0, cpx = 0.0, cmx = 0.0;
    double bpy = 0.0, bmy = 0.0, cpy = 0.0, cmy = 0.0;
    for (int pid : net.pin_ids) {
      const double px = netlist.pin_x(pid, locations);
      const double py = netlist.pin_y(pid, locations);
      const double apx = ws.a_max_x[pid];
      const double amx = ws.a_min_x[pid];
      const double apy = ws.a_max_y[pid];
      const double amy = ws.a_min_y[pid];
      bpx += apx;
      cpx += px * apx;
      bmx += amx;
      cmx += px * amx;
      bpy += apy;
      cpy += py * apy;
      bmy += amy;
      cmy += py * amy;
    }
    ws.b_max_x[e] = bpx;
    ws.b_min_x[e] = bmx;
    ws.b_max_y[e] = bpy;
    ws.b_min_y[e] = bmy;
    ws.c_max_x[e] = cpx;
    ws.c_min_x[e] = cmx;
    ws.c_max_y[e] = cpy;
    ws.c_min_y[e] = cmy;
  }

#pragma omp parallel for schedule(static)
  for (int p = 0; p < num_pins; ++p) {
    const int e = pins[p].net;
    const Net& net = nets[e];
    if (!net_active(net, ignore_net_degree)) {
      ws.grad_x[p] = 0.0;
      ws.grad_y[p] = 0.0;
      continue;
    }
    const double px = netlist.pin_x(p, locations);
    const double py = netlist.pin_y(p, locations);
    const double gx =
        ((1.0 + px * inv_gamma) * ws.b_max_x[e] - inv_gamma * ws.c_max_x[e]) /
            (ws.b_max_x[e] * ws.b_max_x[e]) * ws.a_max_x[p] -
        ((1.0 - px * inv_gamma) * ws.b_min_x[e] + inv_gamma * ws.c_min_x[e]) /
            (ws.b_min_x[e] * ws.b_min_x[e]) * ws.a_min_x[p];
    const double gy =
        ((1.0 + py * inv_gamma) * ws.b_max_y[e] - inv_gamma * ws.c_max_y[e]) /
            (ws.b_max_y[e] * ws.b_max_y[e]) * ws.a_max_y[p] -
        ((1.0 - py * inv_gamma) * ws.b_min_y[e] + inv_gamma * ws.c_min_y[e]) /
            (ws.b_min_y[e] * ws.b_min_y[e]) * ws.a_min_y[p];
    const double w = net_weight_of(net, net_weights);
    ws.grad_x[p] = w * gx;
    ws.grad_y[p] = w * gy;
  }

#pragma omp parallel for schedule(static)
  for (int v = 0; v < num_instances; ++v) {
    double fx = 0.0;
    double fy = 0.0;
    for (int pid : instances[v].pin_ids) {
      fx -= ws.grad_x[pid];
      fy -= ws.grad_y[pid];
    }
    ws.force_x[v] = fx;
    ws.force_y[v] = fy;
  }
}

}  // namespace flowplace
