#pragma once

#include <complex>
#include <string>

namespace gssh {

using cplx = std::complex<double>;

/// Hopping amplitudes of the generalized SSH chain.
///
///  - `J e^{i phi}`: intracell coupling a_j <-> b_j
///  - `v`: a_{j+1} <-> b_j
///  - `z`: b_{j+1} <-> a_j
///
/// Magnitudes are non-negative; the only phase sits on the intracell term.
struct CouplingParams {
  double J = 0.0;
  double phi = 0.0;
  double v = 1.0;
  double z = 0.0;

  cplx intracell() const { return std::polar(J, phi); }

  friend bool operator==(const CouplingParams&, const CouplingParams&) = default;
};

/// Throws ConfigError naming the offending field unless J >= 0, v > 0, z >= 0 and all finite.
void validate(const CouplingParams& p);

/// Same as validate() but allows v == 0. Time-dependent schedules pass through v = 0.
void validate_hoppings(const CouplingParams& p);

std::string to_string(const CouplingParams& p);

}  // namespace gssh
