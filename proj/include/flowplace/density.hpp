#pragma once

#include <vector>

#include "flowplace/netlist.hpp"

namespace flowplace {

// Regular bin grid over the core region. Grid dimensions must be powers of
// two (cosine-transform contract). rho is area density per bin (deposited
// area / bin area); psi and field come from the Poisson solve.
struct BinGrid {
  int nx = 0, ny = 0;
  Rect core;
  double bin_w = 0.0, bin_h = 0.0;
  double target_density = 1.0;
  std::vector<double> rho;      // [iy * nx + ix]
  std::vector<double> psi;
  std::vector<double> field_x;
  std::vector<double> field_y;
  // total effective area placed by the last deposit; overflow denominator
  double deposited_area = 0.0;

  static BinGrid make(Rect core, int nx, int ny, double target_density);

  double bin_area() const { return bin_w * bin_h; }
  int num_bins() const { return nx * ny; }
  double& at(std::vector<double>& a, int ix, int iy) const { return a[iy * nx + ix]; }
};

// Smallest power of two >= sqrt(movable_count), clamped to [16, 1024].
int auto_grid_dim(int movable_count);

// Area an instance presents to the density system: macros are scaled by the
// grid target density, terminals and star centers present nothing.
double effective_area(const Instance& inst, double target_density);

// Spreads each movable instance's effective area over the bins it overlaps.
// Cells smaller than a bin are inflated to the bin footprint with conserved
// area. Instances outside the core are clamped in (with a warning counted in
// the return value).
int deposit_serial(const Netlist& netlist, const Locations& locations, BinGrid& grid);

// Scratch for the bin-owned parallel deposition.
struct DepositScratch {
  std::vector<int> span_x0, span_x1, span_y0, span_y1;  // per instance
  std::vector<double> rect_lx, rect_ly, rect_ux, rect_uy, scale;
  std::vector<int> bin_offsets;   // per bin start into bin_items
  std::vector<int> bin_items;     // instance ids, ascending within each bin
};

// Bin-owned parallel deposition: each bin accumulates the contributions of
// its overlapping instances in ascending instance-id order, so the result is
// bitwise identical to deposit_serial and independent of worker count.
int deposit_parallel(const Netlist& netlist, const Locations& locations,
                     BinGrid& grid, DepositScratch& scratch);

// Solves the discrete Poisson equation lap(psi) = -(rho - mean(rho)) with
// reflective (Neumann) boundaries through a cosine spectral transform, fixes
// the gauge mean(psi) = 0 and computes the field as the negative centered-
// difference gradient of psi.
void solve_potential(BinGrid& grid);

// F_D(v) = effective_area(v) * field bilinearly interpolated at the instance
// center. Terminals and star centers get zero.
void density_force(const Netlist& netlist, const Locations& locations,
                   const BinGrid& grid, std::vector<double>& force_x,
                   std::vector<double>& force_y);

// Density overflow in [0, 1]: total bin area above target, normalized by the
// total deposited movable area.
double overflow(const BinGrid& grid);

}  // namespace flowplace
