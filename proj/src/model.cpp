#include "gssh/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gssh/errors.hpp"
#include "gssh/kernels.hpp"

namespace gssh {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double x, const char* field) {
  if (!std::isfinite(x)) throw ConfigError(std::string(field) + " must be finite");
}

kernels::BlochCoeffs coeffs(const CouplingParams& p) {
  return {p.J * std::cos(p.phi), p.J * std::sin(p.phi), p.v + p.z, p.z - p.v};
}

double scale(const CouplingParams& p) { return p.J + p.v + p.z; }

double abs2_h(double k, const CouplingParams& p) { return std::norm(bloch_h(k, p)); }

// Golden-section minimisation of |h(k)|^2 on [lo, hi].
double golden_min_abs2(const CouplingParams& p, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = abs2_h(c, p), fd = abs2_h(d, p);
  double best = std::min({abs2_h(lo, p), abs2_h(hi, p), fc, fd});
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = abs2_h(c, p);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = abs2_h(d, p);
    }
    best = std::min({best, fc, fd});
  }
  return best;
}

double refined_min_abs2(const CouplingParams& p, const KGrid& grid, const std::vector<double>& re,
                        const std::vector<double>& im) {
  const std::size_t n = grid.size();
  std::size_t imin = 0;
  double fmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double f = re[i] * re[i] + im[i] * im[i];
    if (f < fmin) {
      fmin = f;
      imin = i;
    }
  }
  const double step = 2.0 * kPi / static_cast<double>(n);
  const double k0 = grid.k(imin);
  return std::min(fmin, golden_min_abs2(p, k0 - step, k0 + step));
}

}  // namespace

void validate_hoppings(const CouplingParams& p) {
  require_finite(p.J, "J");
  require_finite(p.phi, "phi");
  require_finite(p.v, "v");
  require_finite(p.z, "z");
  if (p.J < 0.0) throw ConfigError("J must be non-negative");
  if (p.v < 0.0) throw ConfigError("v must be non-negative");
  if (p.z < 0.0) throw ConfigError("z must be non-negative");
}

void validate(const CouplingParams& p) {
  validate_hoppings(p);
  if (!(p.v > 0.0)) throw ConfigError("v must be positive");
}

std::string to_string(const CouplingParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(J=" << p.J << ", phi=" << p.phi << ", v=" << p.v << ", z=" << p.z << ")";
  return os.str();
}

CouplingParams effective_couplings(cplx g0, cplx g_minus, cplx g_plus, cplx alpha0,
                                   cplx alpha_minus, cplx alpha_plus) {
  for (cplx c : {g0, g_minus, g_plus, alpha0, alpha_minus, alpha_plus}) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw ConfigError("coupling inputs must be finite");
  }
  const cplx intra = g0 * alpha0;
  CouplingParams p;
  p.J = std::abs(intra);
  p.phi = (p.J > 0.0) ? std::arg(intra) : 0.0;
  p.v = std::abs(g_minus * alpha_minus);
  p.z = std::abs(g_plus * alpha_plus);
  if (p.v == 0.0) throw ZeroCoupling("g_minus * alpha_minus vanishes; v sets the energy unit");
  return p;
}

cplx bloch_h(double k, const CouplingParams& p) {
  const double c = std::cos(k), s = std::sin(k);
  return p.intracell() + cplx((p.v + p.z) * c, (p.z - p.v) * s);
}

BandPair dispersion(double k, const CouplingParams& p) {
  const double e = std::abs(bloch_h(k, p));
  return {-e, e};
}

std::array<double, 3> d_vector(double k, const CouplingParams& p) {
  return {p.J * std::cos(p.phi) + (p.v + p.z) * std::cos(k),
          p.J * std::sin(p.phi) + (p.z - p.v) * std::sin(k), 0.0};
}

BlochSample bloch_sample(double k, const CouplingParams& p) {
  BlochSample s;
  s.k = k;
  s.h = bloch_h(k, p);
  s.energy_plus = std::abs(s.h);
  s.energy_minus = -s.energy_plus;
  s.d = {s.h.real(), s.h.imag(), 0.0};
  return s;
}

KGrid::KGrid(std::size_t n) : cos_(n), sin_(n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double kk = k(i);
    cos_[i] = std::cos(kk);
    sin_[i] = std::sin(kk);
  }
}

double KGrid::k(std::size_t i) const {
  return -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(cos_.size());
}

void bloch_on_grid(const CouplingParams& p, const KGrid& grid, std::vector<double>& re,
                   std::vector<double>& im) {
  re.resize(grid.size());
  im.resize(grid.size());
  kernels::active().bloch_batch(coeffs(p), grid.cos_k().data(), grid.sin_k().data(), re.data(),
                                im.data(), grid.size());
}

std::vector<BlochSample> sample_brillouin_zone(const CouplingParams& p, std::size_t n_k) {
  KGrid grid(n_k);
  std::vector<double> re, im;
  bloch_on_grid(p, grid, re, im);
  std::vector<BlochSample> out(n_k);
  for (std::size_t i = 0; i < n_k; ++i) {
    BlochSample& s = out[i];
    s.k = grid.k(i);
    s.h = cplx(re[i], im[i]);
    s.energy_plus = std::abs(s.h);
    s.energy_minus = -s.energy_plus;
    s.d = {re[i], im[i], 0.0};
  }
  return out;
}

WindingResult winding_analytic(const CouplingParams& p) {
  WindingResult r;
  r.boundary_distance = 0.5 * band_gap(p, 256);

  const double cx = p.J * std::cos(p.phi);
  const double cy = p.J * std::sin(p.phi);
  const double a = p.v + p.z;
  const double b = p.z - p.v;

  if (b == 0.0) {
    // Degenerate ellipse: segment [cx - a, cx + a] at height cy.
    const bool on_segment =
        std::abs(cy) <= kGapTolerance * scale(p) && std::abs(cx) <= a * (1.0 + kGapTolerance);
    r.value = 0;
    r.well_defined = !on_segment;
    return r;
  }

  const double q = (cx / a) * (cx / a) + (cy / b) * (cy / b);
  if (std::abs(q - 1.0) <= kGapTolerance) {
    r.value = 0;
    r.well_defined = false;
    return r;
  }
  r.value = (q < 1.0) ? (b > 0.0 ? 1 : -1) : 0;
  return r;
}

WindingResult winding_numeric(const CouplingParams& p, std::size_t n_k) {
  if (n_k < 16) throw ConfigError("n_k must be at least 16");
  return winding_numeric(p, KGrid(n_k));
}

WindingResult winding_numeric(const CouplingParams& p, const KGrid& grid) {
  const std::size_t n = grid.size();
  if (n < 16) throw ConfigError("n_k must be at least 16");

  std::vector<double> re, im, dot(n), cross(n);
  bloch_on_grid(p, grid, re, im);
  const double min2 =
      kernels::active().phase_products(re.data(), im.data(), dot.data(), cross.data(), n);
  const double tol = kGapTolerance * scale(p);
  if (!(min2 >= tol * tol)) throw GaplessModel("|h(k)| vanishes for " + to_string(p));

  WindingResult r;
  double total = 0.0;
  bool resolved = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double dtheta = std::atan2(cross[i], dot[i]);
    if (std::abs(dtheta) > 0.9 * kPi) resolved = false;
    total += dtheta;
  }
  const double turns = total / (2.0 * kPi);
  r.value = static_cast<int>(std::lround(turns));
  r.well_defined = resolved && std::abs(turns - r.value) <= 0.01;
  r.boundary_distance = std::sqrt(refined_min_abs2(p, grid, re, im));
  return r;
}

std::vector<double> critical_phase(const CouplingParams& p) {
  const double sum = p.z + p.v, diff = p.z - p.v;
  const double denom = sum * sum - diff * diff;  // 4 v z
  if (p.J == 0.0) throw NoCriticalPhase("J = 0: the intracell phase has no effect");
  if (denom <= 0.0)
    throw NoCriticalPhase("z = 0: gap closes for every phase or for none (circular d-vector path)");

  double cos2 = (p.J * p.J - diff * diff) / denom;
  constexpr double slack = 1e-14;
  if (cos2 < -slack || cos2 > 1.0 + slack)
    throw NoCriticalPhase("no phase closes the gap for " + to_string(p));
  cos2 = std::clamp(cos2, 0.0, 1.0);

  const double ck = std::sqrt(cos2), sk = std::sqrt(1.0 - cos2);
  std::vector<double> phases;
  for (double cs : {ck, -ck}) {
    for (double sn : {sk, -sk}) {
      // J e^{i phi_c} = -(v e^{-ik} + z e^{ik})
      const cplx w = -cplx(sum * cs, diff * sn);
      const double phi_c = std::arg(w);
      if (std::abs(std::polar(p.J, phi_c) - w) > 1e-10 * std::max(1.0, p.J)) continue;
      const bool seen = std::any_of(phases.begin(), phases.end(),
                                    [&](double x) { return std::abs(x - phi_c) < 1e-12; });
      if (!seen) phases.push_back(phi_c);
    }
  }
  if (phases.empty()) throw NoCriticalPhase("no consistent branch for " + to_string(p));
  std::sort(phases.begin(), phases.end());
  return phases;
}

double band_gap(const CouplingParams& p, std::size_t n_k) {
  if (n_k < 64) throw ConfigError("band_gap needs n_k >= 64");
  KGrid grid(n_k);
  std::vector<double> re, im;
  bloch_on_grid(p, grid, re, im);
  return 2.0 * std::sqrt(refined_min_abs2(p, grid, re, im));
}

}  // namespace gssh
