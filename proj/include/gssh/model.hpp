#pragma once

// Momentum-space analysis of the generalized SSH chain: Bloch function h(k),
// two-band dispersion, d-vector geometry, winding number and gap closures.

#include <array>
#include <cstddef>
#include <vector>

#include "gssh/params.hpp"

namespace gssh {

struct BlochSample {
  double k = 0.0;
  cplx h;
  double energy_minus = 0.0;
  double energy_plus = 0.0;
  std::array<double, 3> d{};  // (d_x, d_y, d_z), d_z == 0
};

struct WindingResult {
  int value = 0;
  bool well_defined = true;
  double boundary_distance = 0.0;  // distance of the origin to the traced d-vector curve
};

struct BandPair {
  double minus;
  double plus;
};

/// Maps linearized optomechanical products g*alpha onto the chain couplings:
/// J e^{i phi} = g0 a0, v = |g_- a_-|, z = |g_+ a_+|. Throws ZeroCoupling when v vanishes.
CouplingParams effective_couplings(cplx g0, cplx g_minus, cplx g_plus, cplx alpha0,
                                   cplx alpha_minus, cplx alpha_plus);

cplx bloch_h(double k, const CouplingParams& p);
BandPair dispersion(double k, const CouplingParams& p);
std::array<double, 3> d_vector(double k, const CouplingParams& p);
BlochSample bloch_sample(double k, const CouplingParams& p);

/// Uniform Brillouin-zone grid k_i = -pi + 2 pi i / n with cached cos/sin tables.
class KGrid {
 public:
  explicit KGrid(std::size_t n);

  std::size_t size() const { return cos_.size(); }
  double k(std::size_t i) const;
  const std::vector<double>& cos_k() const { return cos_; }
  const std::vector<double>& sin_k() const { return sin_; }

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// h(k_i) over the grid, evaluated with the active kernel set.
void bloch_on_grid(const CouplingParams& p, const KGrid& grid, std::vector<double>& re,
                   std::vector<double>& im);

std::vector<BlochSample> sample_brillouin_zone(const CouplingParams& p, std::size_t n_k);

/// Relative tolerance below which a quantity counts as a gap closure.
inline constexpr double kGapTolerance = 1e-9;

/// Winding number from the position of the origin relative to the d-vector ellipse
/// centred at (J cos phi, J sin phi) with semi-axes (v + z, |z - v|).
WindingResult winding_analytic(const CouplingParams& p);

/// Winding number from accumulated phase increments of h(k) on n_k samples.
/// Throws GaplessModel if |h| < 1e-9 (J + v + z) at any sample.
WindingResult winding_numeric(const CouplingParams& p, std::size_t n_k);
WindingResult winding_numeric(const CouplingParams& p, const KGrid& grid);

/// Intracell phases at which the gap closes for the given (J, v, z); phi in p is ignored.
/// Sorted ascending in (-pi, pi]. Throws NoCriticalPhase when no phase closes the gap.
std::vector<double> critical_phase(const CouplingParams& p);

/// min_k 2|h(k)|: grid scan on n_k points refined by golden-section search.
double band_gap(const CouplingParams& p, std::size_t n_k = 256);

}  // namespace gssh
