#include "flowplace/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace flowplace {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Footprint {
  double lx, ly, ux, uy;  // inflated rect, clamped into the core
  double scale;           // density contribution per unit overlap area
  bool clamped;           // center had to be moved into the core
  bool skip;
};

// Inflates sub-bin cells to the bin footprint with conserved area and clamps
// the rect into the core.
Footprint footprint_of(const Instance& inst, double cx, double cy,
                       const BinGrid& grid) {
  Footprint fp{};
  if (inst.kind == InstKind::Terminal || inst.kind == InstKind::StarCenter) {
    fp.skip = true;
    return fp;
  }
  const double area = inst.area();
  if (area <= 0.0) {
    fp.skip = true;
    return fp;
  }
  double w = std::max(inst.width, grid.bin_w);
  double h = std::max(inst.height, grid.bin_h);
  w = std::min(w, grid.core.width());
  h = std::min(h, grid.core.height());
  double kind_scale = inst.kind == InstKind::Macro ? grid.target_density : 1.0;
  fp.scale = kind_scale * area / (w * h);

  const double half_w = 0.5 * w;
  const double half_h = 0.5 * h;
  const double clamped_cx =
      std::clamp(cx, grid.core.lx + half_w, grid.core.ux - half_w);
  const double clamped_cy =
      std::clamp(cy, grid.core.ly + half_h, grid.core.uy - half_h);
  // Warn only when the original rect missed the core entirely.
  fp.clamped = cx + inst.width / 2.0 < grid.core.lx ||
               cx - inst.width / 2.0 > grid.core.ux ||
               cy + inst.height / 2.0 < grid.core.ly ||
               cy - inst.height / 2.0 > grid.core.uy;
  fp.lx = clamped_cx - half_w;
  fp.ux = clamped_cx + half_w;
  fp.ly = clamped_cy - half_h;
  fp.uy = clamped_cy + half_h;
  return fp;
}

inline double overlap_len(double lo1, double hi1, double lo2, double hi2) {
  return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

}  // namespace

BinGrid BinGrid::make(Rect core, int nx, int ny, double target_density) {
  if (!is_power_of_two(nx) || !is_power_of_two(ny))
    throw std::invalid_argument("BinGrid: dimensions must be powers of two");
  if (target_density <= 0.0 || target_density > 1.0)
    throw std::invalid_argument("BinGrid: target density must be in (0, 1]");
  if (core.width() <= 0.0 || core.height() <= 0.0)
    throw std::invalid_argument("BinGrid: empty core region");
  BinGrid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.core = core;
  grid.bin_w = core.width() / nx;
  grid.bin_h = core.height() / ny;
  grid.target_density = target_density;
  grid.rho.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  grid.psi.assign(grid.rho.size(), 0.0);
  grid.field_x.assign(grid.rho.size(), 0.0);
  grid.field_y.assign(grid.rho.size(), 0.0);
  return grid;
}

int auto_grid_dim(int movable_count) {
  const double target = std::sqrt(std::max(1, movable_count));
  int dim = 16;
  while (dim < 1024 && dim < target) dim *= 2;
  return dim;
}

double effective_area(const Instance& inst, double target_density) {
  switch (inst.kind) {
    case InstKind::StdCell:
      return inst.area();
    case InstKind::Macro:
      return inst.area() * target_density;
    default:
      return 0.0;
  }
}

int deposit_serial(const Netlist& netlist, const Locations& locations,
                   BinGrid& grid) {
  if (locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument("deposit: location vector length mismatch");
  std::fill(grid.rho.begin(), grid.rho.end(), 0.0);
  grid.deposited_area = 0.0;
  int clamp_warnings = 0;
  const double inv_bw = 1.0 / grid.bin_w;
  const double inv_bh = 1.0 / grid.bin_h;
  for (const Instance& inst : netlist.instances()) {
    const Footprint fp =
        footprint_of(inst, locations.x[inst.id], locations.y[inst.id], grid);
    if (fp.skip) continue;
    if (fp.clamped) ++clamp_warnings;
    grid.deposited_area += effective_area(inst, grid.target_density);
    int ix0 = static_cast<int>(std::floor((fp.lx - grid.core.lx) * inv_bw));
    int ix1 = static_cast<int>(std::floor((fp.ux - grid.core.lx) * inv_bw));
    int iy0 = static_cast<int>(std::floor((fp.ly - grid.core.ly) * inv_bh));
    int iy1 = static_cast<int>(std::floor((fp.uy - grid.core.ly) * inv_bh));
    ix0 = std::clamp(ix0, 0, grid.nx - 1);
    ix1 = std::clamp(ix1, 0, grid.nx - 1);
    iy0 = std::clamp(iy0, 0, grid.ny - 1);
    iy1 = std::clamp(iy1, 0, grid.ny - 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      const double by0 = grid.core.ly + iy * grid.bin_h;
      const double oy = overlap_len(fp.ly, fp.uy, by0, by0 + grid.bin_h);
      for (int ix = ix0; ix <= ix1; ++ix) {
        const double bx0 = grid.core.lx + ix * grid.bin_w;
        const double ox = overlap_len(fp.lx, fp.ux, bx0, bx0 + grid.bin_w);
        grid.rho[iy * grid.nx + ix] += fp.scale * (ox * oy);
      }
    }
  }
  const double inv_bin_area = 1.0 / grid.bin_area();
  for (double& r : grid.rho) r *= inv_bin_area;
  return clamp_warnings;
}

int deposit_parallel(const Netlist& netlist, const Locations& locations,
                     BinGrid& grid, DepositScratch& scratch) {
  if (locations.size() != static_cast<std::size_t>(netlist.num_instances()))
    throw std::invalid_argument("deposit: location vector length mismatch");
  const int nv = netlist.num_instances();
  const int nb = grid.num_bins();
  scratch.span_x0.assign(nv, 0);
  scratch.span_x1.assign(nv, -1);
  scratch.span_y0.assign(nv, 0);
  scratch.span_y1.assign(nv, -1);
  scratch.rect_lx.resize(nv);
  scratch.rect_ly.resize(nv);
  scratch.rect_ux.resize(nv);
  scratch.rect_uy.resize(nv);
  scratch.scale.resize(nv);

  const double inv_bw = 1.0 / grid.bin_w;
  const double inv_bh = 1.0 / grid.bin_h;
  int clamp_warnings = 0;

  // Phase 1 (per instance): footprints and bin spans, owned slots.
#pragma omp parallel for schedule(static) reduction(+ : clamp_warnings)
  for (int v = 0; v < nv; ++v) {
    const Instance& inst = netlist.instance(v);
    const Footprint fp = footprint_of(inst, locations.x[v], locations.y[v], grid);
    if (fp.skip) {
      scratch.span_x1[v] = -1;
      scratch.span_y1[v] = -1;
      continue;
    }
    if (fp.clamped) ++clamp_warnings;
    int ix0 = static_cast<int>(std::floor((fp.lx - grid.core.lx) * inv_bw));
    int ix1 = static_cast<int>(std::floor((fp.ux - grid.core.lx) * inv_bw));
    int iy0 = static_cast<int>(std::floor((fp.ly - grid.core.ly) * inv_bh));
    int iy1 = static_cast<int>(std::floor((fp.uy - grid.core.ly) * inv_bh));
    scratch.span_x0[v] = std::clamp(ix0, 0, grid.nx - 1);
    scratch.span_x1[v] = std::clamp(ix1, 0, grid.nx - 1);
    scratch.span_y0[v] = std::clamp(iy0, 0, grid.ny - 1);
    scratch.span_y1[v] = std::clamp(iy1, 0, grid.ny - 1);
    scratch.rect_lx[v] = fp.lx;
    scratch.rect_ly[v] = fp.ly;
    scratch.rect_ux[v] = fp.ux;
    scratch.rect_uy[v] = fp.uy;
    scratch.scale[v] = fp.scale;
  }

  // Counting pass (serial): per-bin item counts, then offsets; the item list
  // is filled in ascending instance id so each bin sees a fixed order. The
  // deposited-area total is accumulated here in the same order as the serial
  // reference, keeping it worker-count independent.
  double deposited = 0.0;
  scratch.bin_offsets.assign(nb + 1, 0);
  for (int v = 0; v < nv; ++v) {
    if (scratch.span_x1[v] < scratch.span_x0[v]) continue;
    deposited += effective_area(netlist.instance(v), grid.target_density);
    for (int iy = scratch.span_y0[v]; iy <= scratch.span_y1[v]; ++iy)
      for (int ix = scratch.span_x0[v]; ix <= scratch.span_x1[v]; ++ix)
        ++scratch.bin_offsets[iy * grid.nx + ix + 1];
  }
  for (int b = 0; b < nb; ++b) scratch.bin_offsets[b + 1] += scratch.bin_offsets[b];
  scratch.bin_items.resize(scratch.bin_offsets[nb]);
  {
    std::vector<int> cursor(scratch.bin_offsets.begin(), scratch.bin_offsets.end() - 1);
    for (int v = 0; v < nv; ++v) {
      if (scratch.span_x1[v] < scratch.span_x0[v]) continue;
      for (int iy = scratch.span_y0[v]; iy <= scratch.span_y1[v]; ++iy)
        for (int ix = scratch.span_x0[v]; ix <= scratch.span_x1[v]; ++ix)
          scratch.bin_items[cursor[iy * grid.nx + ix]++] = v;
    }
  }

  // Phase 2 (per bin): gather contributions in instance order. Matches the
  // serial scatter order bin by bin, hence bitwise equal results.
  const double inv_bin_area = 1.0 / grid.bin_area();
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int ix = b % grid.nx;
    const int iy = b / grid.nx;
    const double bx0 = grid.core.lx + ix * grid.bin_w;
    const double by0 = grid.core.ly + iy * grid.bin_h;
    double acc = 0.0;
    for (int k = scratch.bin_offsets[b]; k < scratch.bin_offsets[b + 1]; ++k) {
      const int v = scratch.bin_items[k];
      const double ox =
          overlap_len(scratch.rect_lx[v], scratch.rect_ux[v], bx0, bx0 + grid.bin_w);
      const double oy =
          overlap_len(scratch.rect_ly[v], scratch.rect_uy[v], by0, by0 + grid.bin_h);
      acc += scratch.scale[v] * (ox * oy);
    }
    grid.rho[b] = acc * inv_bin_area;
  }

  grid.deposited_area = deposited;
  return clamp_warnings;
}

void density_force(const Netlist& netlist, const Locations& locations,
                   const BinGrid& grid, std::vector<double>& force_x,
                   std::vector<double>& force_y) {
  const int nv = netlist.num_instances();
  force_x.assign(nv, 0.0);
  force_y.assign(nv, 0.0);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < nv; ++v) {
    const Instance& inst = netlist.instance(v);
    const double q = effective_area(inst, grid.target_density);
    if (q <= 0.0) continue;
    // bilinear interpolation on bin centers, clamped to the center lattice
    double gx = (locations.x[v] - grid.core.lx) / grid.bin_w - 0.5;
    double gy = (locations.y[v] - grid.core.ly) / grid.bin_h - 0.5;
    gx = std::clamp(gx, 0.0, static_cast<double>(grid.nx - 1));
    gy = std::clamp(gy, 0.0, static_cast<double>(grid.ny - 1));
    const int ix0 = std::min(static_cast<int>(gx), grid.nx - 1);
    const int iy0 = std::min(static_cast<int>(gy), grid.ny - 1);
    const int ix1 = std::min(ix0 + 1, grid.nx - 1);
    const int iy1 = std::min(iy0 + 1, grid.ny - 1);
    const double tx = gx - ix0;
    const double ty = gy - iy0;
    const auto sample = [&](const std::vector<double>& f) {
      const double f00 = f[iy0 * grid.nx + ix0];
      const double f10 = f[iy0 * grid.nx + ix1];
      const double f01 = f[iy1 * grid.nx + ix0];
      const double f11 = f[iy1 * grid.nx + ix1];
      return (1.0 - ty) * ((1.0 - tx) * f00 + tx * f10) +
             ty * ((1.0 - tx) * f01 + tx * f11);
    };
    force_x[v] = q * sample(grid.field_x);
    force_y[v] = q * sample(grid.field_y);
  }
}

double overflow(const BinGrid& grid) {
  if (grid.deposited_area <= 0.0) return 0.0;
  const double bin_area = grid.bin_area();
  double over = 0.0;
  for (double r : grid.rho)
    over += std::max(0.0, (r - grid.target_density) * bin_area);
  return over / grid.deposited_area;
}

}  // namespace flowplace
