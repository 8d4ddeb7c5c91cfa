#include <cmath>
#include <stdexcept>

#include "flowplace/wirelength.hpp"

namespace flowplace {

void WaWorkspace::resize(const Netlist& netlist) {
  const std::size_t ne = netlist.num_nets();
  const std::size_t np = netlist.num_pins();
  const std::size_t nv = netlist.num_instances();
  net_max_x.assign(ne, 0.0);
  net_min_x.assign(ne, 0.0);
  net_max_y.assign(ne, 0.0);
  net_min_y.assign(ne, 0.0);
  b_max_x.assign(ne, 0.0);
  b_min_x.assign(ne, 0.0);
  b_max_y.assign(ne, 0.0);
  b_min_y.assign(ne, 0.0);
  c_max_x.assign(ne, 0.0);
  c_min_x.assign(ne, 0.0);
  c_max_y.assign(ne, 0.0);
  c_min_y.assign(ne, 0.0);
  a_max_x.assign(np, 0.0);
  a_min_x.assign(np, 0.0);
  a_max_y.assign(np, 0.0);
  a_min_y.assign(np, 0.0);
  grad_x.assign(np, 0.0);
  grad_y.assign(np, 0.0);
  force_x.assign(nv, 0.0);
  force_y.assign(nv, 0.0);
}

bool WaWorkspace::sized_for(const Netlist& netlist) const {
  return net_max_x.size() == static_cast<std::size_t>(netlist.num_nets()) &&
         a_max_x.size() == static_cast<std::size_t>(netlist.num_pins()) &&
         force_x.size() == static_cast<std::size_t>(netlist.num_instances());
}

namespace {

inline double net_weight_of(const Net& net, std::span<const double> net_weights) {
  return net_weights.empty() ? net.weight : net_weights[net.id];
}

}  // namespace

double wa_wirelength(const Netlist& netlist, const Locations& locations,
                     double gamma, std::span<const double> net_weights,
                     long long ignore_net_degree) {
  if (gamma <= 0.0) throw std::invalid_argument("wa_wirelength: gamma must be > 0");
  if (locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument("wa_wirelength: location vector length mismatch");
  const double inv_gamma = 1.0 / gamma;
  double total = 0.0;
  for (const Net& net : netlist.nets()) {
    if (net.degree() < 2 || net.degree() > ignore_net_degree) continue;
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
    double bpx = 0.0, bmx = 0.0, cpx = 0.0, cmx = 0.0;
    double bpy = 0.0, bmy = 0.0, cpy = 0.0, cmy = 0.0;
    for (int pid : net.pin_ids) {
      const double px = netlist.pin_x(pid, locations);
      const double py = netlist.pin_y(pid, locations);
      const double apx = std::exp((px - max_x) * inv_gamma);
      const double amx = std::exp((min_x - px) * inv_gamma);
      const double apy = std::exp((py - max_y) * inv_gamma);
      const double amy = std::exp((min_y - py) * inv_gamma);
      bpx += apx;
      cpx += px * apx;
      bmx += amx;
      cmx += px * amx;
      bpy += apy;
      cpy += py * apy;
      bmy += amy;
      cmy += py * amy;
    }
    const double w = net_weight_of(net, net_weights);
    total += w * ((cpx / bpx - cmx / bmx) + (cpy / bpy - cmy / bmy));
  }
  return total;
}

void wa_gradient_serial(const Netlist& netlist, const Locations& locations,
                        double gamma, WaWorkspace& ws,
                        std::span<const double> net_weights,
                        long long ignore_net_degree) {
  if (gamma <= 0.0)
    throw std::invalid_argument("wa_gradient_serial: gamma must be > 0");
  if (locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument("wa_gradient_serial: location vector length mismatch");
  if (!ws.sized_for(netlist))
    throw std::invalid_argument("wa_gradient_serial: workspace size mismatch");

  const double inv_gamma = 1.0 / gamma;

  for (const Net& net : netlist.nets()) {
    const bool active = net.degree() >= 2 && net.degree() <= ignore_net_degree;
    const int e = net.id;
    ws.b_max_x[e] = 0.0;
    ws.b_min_x[e] = 0.0;
    ws.b_max_y[e] = 0.0;
    ws.b_min_y[e] = 0.0;
    ws.c_max_x[e] = 0.0;
    ws.c_min_x[e] = 0.0;
    ws.c_max_y[e] = 0.0;
    ws.c_min_y[e] = 0.0;
    if (!active) {
      ws.net_max_x[e] = 0.0;
      ws.net_min_x[e] = 0.0;
      ws.net_max_y[e] = 0.0;
      ws.net_min_y[e] = 0.0;
      for (int pid : net.pin_ids) {
        ws.a_max_x[pid] = 0.0;
        ws.a_min_x[pid] = 0.0;
        ws.a_max_y[pid] = 0.0;
        ws.a_min_y[pid] = 0.0;
        ws.grad_x[pid] = 0.0;
        ws.grad_y[pid] = 0.0;
      }
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

    for (int pid : net.pin_ids) {
      const double px = netlist.pin_x(pid, locations);
      const double py = netlist.pin_y(pid, locations);
      const double apx = std::exp((px - max_x) * inv_gamma);
      const double amx = std::exp((min_x - px) * inv_gamma);
      const double apy = std::exp((py - max_y) * inv_gamma);
      const double amy = std::exp((min_y - py) * inv_gamma);
      ws.a_max_x[pid] = apx;
      ws.a_min_x[pid] = amx;
      ws.a_max_y[pid] = apy;
      ws.a_min_y[pid] = amy;
      ws.b_max_x[e] += apx;
      ws.c_max_x[e] += px * apx;
      ws.b_min_x[e] += amx;
      ws.c_min_x[e] += px * amx;
      ws.b_max_y[e] += apy;
      ws.c_max_y[e] += py * apy;
      ws.b_min_y[e] += amy;
      ws.c_min_y[e] += py * amy;
    }

    const double w = net_weight_of(net, net_weights);
    for (int pid : net.pin_ids) {
      const double px = netlist.pin_x(pid, locations);
      const double py = netlist.pin_y(pid, locations);
      const double gx =
          ((1.0 + px * inv_gamma) * ws.b_max_x[e] - inv_gamma * ws.c_max_x[e]) /
              (ws.b_max_x[e] * ws.b_max_x[e]) * ws.a_max_x[pid] -
          ((1.0 - px * inv_gamma) * ws.b_min_x[e] + inv_gamma * ws.c_min_x[e]) /
              (ws.b_min_x[e] * ws.b_min_x[e]) * ws.a_min_x[pid];
      const double gy =
          ((1.0 + py * inv_gamma) * ws.b_max_y[e] - inv_gamma * ws.c_max_y[e]) /
              (ws.b_max_y[e] * ws.b_max_y[e]) * ws.a_max_y[pid] -
          ((1.0 - py * inv_gamma) * ws.b_min_y[e] + inv_gamma * ws.c_min_y[e]) /
              (ws.b_min_y[e] * ws.b_min_y[e]) * ws.a_min_y[pid];
      ws.grad_x[pid] = w * gx;
      ws.grad_y[pid] = w * gy;
    }
  }

  for (const Instance& inst : netlist.instances()) {
    double fx = 0.0;
    double fy = 0.0;
    for (int pid : inst.pin_ids) {
      fx -= ws.grad_x[pid];
      fy -= ws.grad_y[pid];
    }
    ws.force_x[inst.id] = fx;
    ws.force_y[inst.id] = fy;
  }
}

}  // namespace flowplace
