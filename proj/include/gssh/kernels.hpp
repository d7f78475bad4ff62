#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// where the build and CPU allow it, an AVX2/FMA version. The active variant is
// chosen once at startup; set GSSH_KERNELS=scalar to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace gssh::kernels {

/// Coefficients of h(k) = c0 + ax cos k + i (c1 + ay sin k), split into real parts.
struct BlochCoeffs {
  double center_re;  // J cos phi
  double center_im;  // J sin phi
  double axis_re;    // v + z
  double axis_im;    // z - v
};

/// Split-complex dense matrix, row-major. `re[i * n + j]` is element (i, j).
struct SplitMatrixView {
  const double* re;
  const double* im;
  std::size_t n;
};

struct KernelTable {
  std::string_view name;

  /// out_re[i] + i out_im[i] = h(k_i) given cos k_i, sin k_i.
  void (*bloch_batch)(const BlochCoeffs& c, const double* cos_k, const double* sin_k,
                      double* out_re, double* out_im, std::size_t n);

  /// Cyclic neighbour products: dot[i] = Re(conj(h_i) h_{i+1}), cross[i] = Im(conj(h_i) h_{i+1}),
  /// with h_n == h_0. Returns min_i |h_i|^2.
  double (*phase_products)(const double* re, const double* im, double* dot, double* cross,
                           std::size_t n);

  /// y = A x (adjoint == false) or y = A^H x (adjoint == true), split-complex.
  void (*cmatvec)(SplitMatrixView a, bool adjoint, const double* x_re, const double* x_im,
                  double* y_re, double* y_im);

  /// out[i] = re[i]^2 + im[i]^2.
  void (*abs2)(const double* re, const double* im, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();

/// Kernels used by the library. Picked on first call.
const KernelTable& active();

}  // namespace gssh::kernels
