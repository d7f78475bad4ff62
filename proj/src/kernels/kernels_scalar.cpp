#include "gssh/kernels.hpp"

#include <algorithm>
#include <limits>

namespace gssh::kernels {
namespace {

void bloch_batch(const BlochCoeffs& c, const double* cos_k, const double* sin_k, double* out_re,
                 double* out_im, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out_re[i] = c.center_re + c.axis_re * cos_k[i];
    out_im[i] = c.center_im + c.axis_im * sin_k[i];
  }
}

double phase_products(const double* re, const double* im, double* dot, double* cross,
                      std::size_t n) {
  double min_norm2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1 == n) ? 0 : i + 1;
    dot[i] = re[i] * re[j] + im[i] * im[j];
    cross[i] = re[i] * im[j] - im[i] * re[j];
    min_norm2 = std::min(min_norm2, re[i] * re[i] + im[i] * im[i]);
  }
  return min_norm2;
}

void cmatvec(SplitMatrixView a, bool adjoint, const double* x_re, const double* x_im,
             double* y_re, double* y_im) {
  const std::size_t n = a.n;
  if (!adjoint) {
    for (std::size_t i = 0; i < n; ++i) {
      double sr = 0.0, si = 0.0;
      const double* ar = a.re + i * n;
      const double* ai = a.im + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        sr += ar[j] * x_re[j] - ai[j] * x_im[j];
        si += ar[j] * x_im[j] + ai[j] * x_re[j];
      }
      y_re[i] = sr;
      y_im[i] = si;
    }
    return;
  }
  // y_j = sum_i conj(a_ij) x_i, accumulated row by row.
  std::fill(y_re, y_re + n, 0.0);
  std::fill(y_im, y_im + n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ar = a.re + i * n;
    const double* ai = a.im + i * n;
    const double xr = x_re[i], xi = x_im[i];
    for (std::size_t j = 0; j < n; ++j) {
      y_re[j] += ar[j] * xr + ai[j] * xi;
      y_im[j] += ar[j] * xi - ai[j] * xr;
    }
  }
}

void abs2(const double* re, const double* im, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = re[i] * re[i] + im[i] * im[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", bloch_batch, phase_products, cmatvec, abs2};
  return table;
}

}  // namespace gssh::kernels
