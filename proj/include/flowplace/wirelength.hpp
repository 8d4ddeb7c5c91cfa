#pragma once

#include <span>
#include <vector>

#include "flowplace/netlist.hpp"

namespace flowplace {

// Scratch arrays for the weighted-average wirelength kernels. Sized once per
// netlist and re-zeroed on every call. The max-shifted exponentials keep all
// per-pin terms in (0, 1].
struct WaWorkspace {
  // per net, per axis: extremal pin coordinates
  std::vector<double> net_max_x, net_min_x, net_max_y, net_min_y;
  // per net, per axis: b_e = sum of shifted exponentials, c_e = coordinate-
  // weighted sum (plus/minus sides)
  std::vector<double> b_max_x, b_min_x, b_max_y, b_min_y;
  std::vector<double> c_max_x, c_min_x, c_max_y, c_min_y;
  // per pin: shifted exponentials and the weighted gradient
  std::vector<double> a_max_x, a_min_x, a_max_y, a_min_y;
  std::vector<double> grad_x, grad_y;
  // per instance: wirelength force (negated gradient sum)
  std::vector<double> force_x, force_y;

  void resize(const Netlist& netlist);
  bool sized_for(const Netlist& netlist) const;
};

inline constexpr long long kNoNetDegreeLimit = 1'000'000'000LL;

// Smooth weighted-average approximation of HPWL; exact in the limit
// gamma -> 0+. net_weights, when nonempty, overrides the stored net weights
// (indexed by net id).
double wa_wirelength(const Netlist& netlist, const Locations& locations,
                     double gamma, std::span<const double> net_weights = {},
                     long long ignore_net_degree = kNoNetDegreeLimit);

// Reference implementation: nets then pins, fixed pin-id accumulation order.
// Oracle for the parallel kernel.
void wa_gradient_serial(const Netlist& netlist, const Locations& locations,
                        double gamma, WaWorkspace& workspace,
                        std::span<const double> net_weights = {},
                        long long ignore_net_degree = kNoNetDegreeLimit);

// Five-phase data-parallel kernel. Each phase writes only owned slots (per
// net / per pin / per instance), so there are no atomic read-modify-write
// operations and the result is bitwise identical for any worker count and to
// the serial reference.
void wa_gradient_parallel(const Netlist& netlist, const Locations& locations,
                          double gamma, WaWorkspace& workspace,
                          std::span<const double> net_weights = {},
                          long long ignore_net_degree = kNoNetDegreeLimit);

}  // namespace flowplace
