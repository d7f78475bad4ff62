#include "gssh/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <limits>

namespace gssh::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, sh));
}

void bloch_batch(const BlochCoeffs& c, const double* cos_k, const double* sin_k, double* out_re,
                 double* out_im, std::size_t n) {
  const __m256d cr = _mm256_set1_pd(c.center_re);
  const __m256d ci = _mm256_set1_pd(c.center_im);
  const __m256d ar = _mm256_set1_pd(c.axis_re);
  const __m256d ai = _mm256_set1_pd(c.axis_im);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out_re + i, _mm256_fmadd_pd(ar, _mm256_loadu_pd(cos_k + i), cr));
    _mm256_storeu_pd(out_im + i, _mm256_fmadd_pd(ai, _mm256_loadu_pd(sin_k + i), ci));
  }
  for (; i < n; ++i) {
    out_re[i] = c.center_re + c.axis_re * cos_k[i];
    out_im[i] = c.center_im + c.axis_im * sin_k[i];
  }
}

double phase_products(const double* re, const double* im, double* dot, double* cross,
                      std::size_t n) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  // Vector body covers i + 4 < n so that re[i + 1 .. i + 4] stays in range.
  for (; i + 5 <= n; i += 4) {
    const __m256d r0 = _mm256_loadu_pd(re + i);
    const __m256d i0 = _mm256_loadu_pd(im + i);
    const __m256d r1 = _mm256_loadu_pd(re + i + 1);
    const __m256d i1 = _mm256_loadu_pd(im + i + 1);
    _mm256_storeu_pd(dot + i, _mm256_fmadd_pd(r0, r1, _mm256_mul_pd(i0, i1)));
    _mm256_storeu_pd(cross + i, _mm256_fmsub_pd(r0, i1, _mm256_mul_pd(i0, r1)));
    vmin = _mm256_min_pd(vmin, _mm256_fmadd_pd(r0, r0, _mm256_mul_pd(i0, i0)));
  }
  double min_norm2 = hmin(vmin);
  for (; i < n; ++i) {
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
      const double* ar = a.re + i * n;
      const double* ai = a.im + i * n;
      __m256d sr = _mm256_setzero_pd();
      __m256d si = _mm256_setzero_pd();
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        const __m256d vr = _mm256_loadu_pd(ar + j);
        const __m256d vi = _mm256_loadu_pd(ai + j);
        const __m256d xr = _mm256_loadu_pd(x_re + j);
        const __m256d xi = _mm256_loadu_pd(x_im + j);
        sr = _mm256_fmadd_pd(vr, xr, sr);
        sr = _mm256_fnmadd_pd(vi, xi, sr);
        si = _mm256_fmadd_pd(vr, xi, si);
        si = _mm256_fmadd_pd(vi, xr, si);
      }
      double tr = hsum(sr), ti = hsum(si);
      for (; j < n; ++j) {
        tr += ar[j] * x_re[j] - ai[j] * x_im[j];
        ti += ar[j] * x_im[j] + ai[j] * x_re[j];
      }
      y_re[i] = tr;
      y_im[i] = ti;
    }
    return;
  }
  std::fill(y_re, y_re + n, 0.0);
  std::fill(y_im, y_im + n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ar = a.re + i * n;
    const double* ai = a.im + i * n;
    const __m256d xr = _mm256_set1_pd(x_re[i]);
    const __m256d xi = _mm256_set1_pd(x_im[i]);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d vr = _mm256_loadu_pd(ar + j);
      const __m256d vi = _mm256_loadu_pd(ai + j);
      __m256d yr = _mm256_loadu_pd(y_re + j);
      __m256d yi = _mm256_loadu_pd(y_im + j);
      yr = _mm256_fmadd_pd(vr, xr, yr);
      yr = _mm256_fmadd_pd(vi, xi, yr);
      yi = _mm256_fmadd_pd(vr, xi, yi);
      yi = _mm256_fnmadd_pd(vi, xr, yi);
      _mm256_storeu_pd(y_re + j, yr);
      _mm256_storeu_pd(y_im + j, yi);
    }
    for (; j < n; ++j) {
      y_re[j] += ar[j] * x_re[i] + ai[j] * x_im[i];
      y_im[j] += ar[j] * x_im[i] - ai[j] * x_re[i];
    }
  }
}

void abs2(const double* re, const double* im, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(r, r, _mm256_mul_pd(m, m)));
  }
  for (; i < n; ++i) out[i] = re[i] * re[i] + im[i] * im[i];
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", bloch_batch, phase_products, cmatvec, abs2};
  return table;
}

}  // namespace gssh::kernels
