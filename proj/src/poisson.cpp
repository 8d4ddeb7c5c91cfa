#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include <omp.h>

#include "flowplace/density.hpp"

namespace flowplace {

namespace {

// Dense cosine-II basis for one transform size; basis[k * n + j] =
// cos(pi * k * (2j + 1) / (2n)). Sizes are small powers of two, so the
// direct matrix transform is fast enough and trivially deterministic.
struct CosineBasis {
  int n;
  std::vector<double> c;
  explicit CosineBasis(int n_) : n(n_), c(static_cast<std::size_t>(n_) * n_) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        c[k * n + j] = std::cos(std::numbers::pi * k * (2.0 * j + 1.0) / (2.0 * n));
  }
};

const CosineBasis& basis_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<CosineBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<CosineBasis>(n)).first;
  return *it->second;
}

// Forward DCT-II along x for every row: out[k] = sum_j in[j] * cos(...)
void dct_rows(const double* in, double* out, int nx, int ny) {
  const CosineBasis& basis = basis_for(nx);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < ny; ++iy) {
    const double* row = in + static_cast<std::size_t>(iy) * nx;
    double* orow = out + static_cast<std::size_t>(iy) * nx;
    for (int k = 0; k < nx; ++k) {
      const double* ck = basis.c.data() + static_cast<std::size_t>(k) * nx;
      double acc = 0.0;
      for (int j = 0; j < nx; ++j) acc += ck[j] * row[j];
      orow[k] = acc;
    }
  }
}

// Inverse (DCT-III with 1/n scaling) along x for every row.
void idct_rows(const double* in, double* out, int nx, int ny) {
  const CosineBasis& basis = basis_for(nx);
  const double inv_n = 1.0 / nx;
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < ny; ++iy) {
    const double* row = in + static_cast<std::size_t>(iy) * nx;
    double* orow = out + static_cast<std::size_t>(iy) * nx;
    for (int j = 0; j < nx; ++j) {
      double acc = row[0];
      for (int k = 1; k < nx; ++k)
        acc += 2.0 * basis.c[static_cast<std::size_t>(k) * nx + j] * row[k];
      orow[j] = acc * inv_n;
    }
  }
}

void transpose(const double* in, double* out, int nx, int ny) {
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      out[static_cast<std::size_t>(ix) * ny + iy] =
          in[static_cast<std::size_t>(iy) * nx + ix];
}

}  // namespace

void solve_potential(BinGrid& grid) {
  const int nx = grid.nx;
  const int ny = grid.ny;
  const std::size_t nb = grid.rho.size();

  // right-hand side: lap(psi) = -(rho - mean(rho))
  double mean = 0.0;
  for (double r : grid.rho) mean += r;
  mean /= static_cast<double>(nb);

  std::vector<double> work(nb), spec(nb), tmp(nb);
  for (std::size_t i = 0; i < nb; ++i) work[i] = -(grid.rho[i] - mean);

  // 2D DCT-II: rows along x, then columns (via transpose) along y.
  dct_rows(work.data(), tmp.data(), nx, ny);
  transpose(tmp.data(), work.data(), nx, ny);  // now [ix * ny + iy]
  dct_rows(work.data(), spec.data(), ny, nx);

  // Divide by the reflective-Laplacian eigenvalues; zero the (0,0) mode so
  // the potential has zero mean (gauge).
  const double inv_hx2 = 1.0 / (grid.bin_w * grid.bin_w);
  const double inv_hy2 = 1.0 / (grid.bin_h * grid.bin_h);
#pragma omp parallel for schedule(static)
  for (int ix = 0; ix < nx; ++ix) {
    const double ex = (2.0 * std::cos(std::numbers::pi * ix / nx) - 2.0) * inv_hx2;
    for (int iy = 0; iy < ny; ++iy) {
      if (ix == 0 && iy == 0) {
        spec[0] = 0.0;
        continue;
      }
      const double ey =
          (2.0 * std::cos(std::numbers::pi * iy / ny) - 2.0) * inv_hy2;
      spec[static_cast<std::size_t>(ix) * ny + iy] /= (ex + ey);
    }
  }

  // inverse transform back to bin space
  idct_rows(spec.data(), work.data(), ny, nx);
  transpose(work.data(), tmp.data(), ny, nx);  // back to [iy * nx + ix]
  idct_rows(tmp.data(), grid.psi.data(), nx, ny);

  // field = -grad(psi), centered differences with mirrored boundary ghosts
  const double inv_2hx = 1.0 / (2.0 * grid.bin_w);
  const double inv_2hy = 1.0 / (2.0 * grid.bin_h);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t b = static_cast<std::size_t>(iy) * nx + ix;
      const double west = grid.psi[iy * nx + std::max(ix - 1, 0)];
      const double east = grid.psi[iy * nx + std::min(ix + 1, nx - 1)];
      const double south = grid.psi[std::max(iy - 1, 0) * nx + ix];
      const double north = grid.psi[std::min(iy + 1, ny - 1) * nx + ix];
      grid.field_x[b] = -(east - west) * inv_2hx;
      grid.field_y[b] = -(north - south) * inv_2hy;
    }
  }
}

}  // namespace flowplace
