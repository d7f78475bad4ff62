#include "gssh/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "gssh/errors.hpp"

namespace gssh {

namespace {

constexpr double kClusterTol = 1e-9;
constexpr double kResidualTol = 1e-9;
constexpr double kOrthoTol = 1e-10;

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Strict comparison with a small margin keeps the pick stable under round-off ties.
    const double m = std::abs(v(i));
    if (m > best * (1.0 + 1e-12)) {
      best = m;
      imax = i;
    }
  }
  if (best > 0.0) v *= std::conj(v(imax)) / best;
}

// Canonical orthonormal basis of span(cols): repeatedly project the site vector
// with the largest residual weight, then deflate.
Eigen::MatrixXcd canonical_basis(const Eigen::MatrixXcd& cols) {
  const Eigen::Index dim = cols.rows();
  const Eigen::Index k = cols.cols();
  Eigen::MatrixXcd basis(dim, k);
  Eigen::MatrixXcd residual = cols;  // columns span the remaining subspace
  for (Eigen::Index m = 0; m < k; ++m) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double w = residual.row(r).squaredNorm();
      if (w > best + 1e-12) {
        best = w;
        pivot = r;
      }
    }
    // Projection of e_pivot onto the remaining subspace.
    Eigen::VectorXcd v = residual * residual.row(pivot).adjoint();
    for (Eigen::Index q = 0; q < m; ++q) v -= basis.col(q) * basis.col(q).dot(v);
    v.normalize();
    basis.col(m) = v;
    // Remaining subspace: orthonormal frame of (1 - v v^H) residual. Only the subspace
    // matters for the next pivot, so the frame's internal rotation is irrelevant.
    if (m + 1 < k) {
      const Eigen::MatrixXcd deflated = residual - v * (v.adjoint() * residual);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(deflated, Eigen::ComputeThinU);
      residual = svd.matrixU().leftCols(k - m - 1);
    }
  }
  return basis;
}

}  // namespace

std::size_t site_index(Sublattice s, std::size_t cell) {
  return 2 * (cell - 1) + (s == Sublattice::Mechanical ? 1 : 0);
}

ChainHamiltonian build_chain(std::size_t n_cells, Boundary boundary, const CouplingParams& p,
                             double u) {
  if (n_cells < 1 || n_cells > kMaxCells)
    throw InvalidSize("n_cells must be in [1, " + std::to_string(kMaxCells) + "]");
  validate_hoppings(p);
  if (!std::isfinite(u)) throw ConfigError("u must be finite");

  ChainHamiltonian h;
  h.n_cells_ = n_cells;
  h.boundary_ = boundary;
  h.detuning_ = u;
  h.params_ = p;
  const auto dim = static_cast<Eigen::Index>(2 * n_cells);
  h.matrix_ = Eigen::MatrixXcd::Zero(dim, dim);
  auto& m = h.matrix_;

  auto add = [&m](std::size_t row, std::size_t col, cplx value) {
    m(row, col) += value;
    m(col, row) += std::conj(value);
  };

  const cplx intra = p.intracell();
  for (std::size_t j = 1; j <= n_cells; ++j) {
    const auto a = site_index(Sublattice::Cavity, j);
    m(a, a) += u;
    add(a, site_index(Sublattice::Mechanical, j), intra);
  }
  const std::size_t bonds = (boundary == Boundary::Periodic) ? n_cells : n_cells - 1;
  for (std::size_t j = 1; j <= bonds; ++j) {
    const std::size_t next = (j % n_cells) + 1;
    add(site_index(Sublattice::Cavity, next), site_index(Sublattice::Mechanical, j), p.v);
    add(site_index(Sublattice::Mechanical, next), site_index(Sublattice::Cavity, j), p.z);
  }
  return h;
}

Eigen::MatrixXcd ChainHamiltonian::chiral_block() const {
  const auto n = static_cast<Eigen::Index>(n_cells_);
  Eigen::MatrixXcd q(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) q(j, k) = matrix_(2 * j, 2 * k + 1);
  return q;
}

Eigen::VectorXd chiral_operator(std::size_t n_cells) {
  Eigen::VectorXd g(2 * n_cells);
  for (std::size_t i = 0; i < 2 * n_cells; ++i) g(i) = (i % 2 == 0) ? 1.0 : -1.0;
  return g;
}

EigenSystem eigensystem(const ChainHamiltonian& h) { return eigensystem(h.matrix()); }

EigenSystem eigensystem(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("Hermitian eigensolver failed");

  EigenSystem es;
  es.energies = solver.eigenvalues();
  es.states = solver.eigenvectors();
  const Eigen::Index n = es.energies.size();
  es.norm = (n == 0) ? 0.0 : std::max(std::abs(es.energies(0)), std::abs(es.energies(n - 1)));

  const double cluster_tol = kClusterTol * es.norm;
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start + 1;
    while (end < n && es.energies(end) - es.energies(end - 1) <= cluster_tol) ++end;
    const Eigen::Index size = end - start;
    if (size > 1) es.states.middleCols(start, size) = canonical_basis(es.states.middleCols(start, size));
    for (Eigen::Index c = start; c < end; ++c) fix_phase(es.states.col(c));
    start = end;
  }

  const double ortho =
      (es.states.adjoint() * es.states - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  double residual = 0.0;
  for (Eigen::Index c = 0; c < n; ++c)
    residual = std::max(residual, (h * es.states.col(c) - es.energies(c) * es.states.col(c)).norm());
  if (ortho > kOrthoTol || residual > kResidualTol * es.norm)
    throw ConvergenceFailure("eigensystem check failed: orthonormality " + std::to_string(ortho) +
                             ", residual " + std::to_string(residual));
  return es;
}

double signed_mid_gap(const ChainHamiltonian& h, const EigenSystem& es) {
  const auto n = static_cast<Eigen::Index>(h.n_cells());
  const double magnitude = es.energies(n);
  // Sign of Re det Q from the LU pivots' phases; avoids overflow of the determinant itself.
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(h.chiral_block());
  const Eigen::MatrixXcd& f = lu.matrixLU();
  double phase = (lu.permutationP().determinant() < 0) ? std::numbers::pi : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (f(i, i) == cplx(0.0, 0.0)) return 0.0;
    phase += std::arg(f(i, i));
  }
  return std::cos(phase) >= 0.0 ? magnitude : -magnitude;
}

SpectrumSweep spectrum_sweep(std::size_t n_cells, const CouplingParams& base, double J_min,
                             double J_max, std::size_t steps, double u) {
  if (steps < 2) throw ConfigError("steps must be at least 2");
  if (!(J_min >= 0.0) || !(J_max >= J_min) || !std::isfinite(J_max))
    throw ConfigError("J range must satisfy 0 <= J_min <= J_max");

  SpectrumSweep sweep;
  sweep.n_cells = n_cells;
  sweep.base = base;
  sweep.detuning = u;
  sweep.rows.resize(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    CouplingParams p = base;
    p.J = J_min + (J_max - J_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    const ChainHamiltonian h = build_chain(n_cells, Boundary::Open, p, u);
    const EigenSystem es = eigensystem(h);
    sweep.rows[i] = {p.J, es.energies, signed_mid_gap(h, es)};
  }
  return sweep;
}

std::vector<double> find_zero_mode_crossings(const SpectrumSweep& sweep, double tol) {
  std::vector<double> out;
  if (sweep.rows.size() < 2) return out;

  auto gap_at = [&](double J) {
    CouplingParams p = sweep.base;
    p.J = J;
    const ChainHamiltonian h = build_chain(sweep.n_cells, Boundary::Open, p, sweep.detuning);
    const EigenSystem es = eigensystem(h);
    return std::pair{signed_mid_gap(h, es), es.norm};
  };

  for (std::size_t i = 0; i + 1 < sweep.rows.size(); ++i) {
    const SweepRow& left = sweep.rows[i];
    const SweepRow& right = sweep.rows[i + 1];
    if (left.signed_mid_gap == 0.0) {
      out.push_back(left.J);
      continue;
    }
    if (right.signed_mid_gap == 0.0 || (left.signed_mid_gap > 0.0) == (right.signed_mid_gap > 0.0))
      continue;

    double lo = left.J, hi = right.J;
    double f_lo = left.signed_mid_gap;
    for (int it = 0; it < 40 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = gap_at(mid).first;
      if (f_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((f_mid > 0.0) == (f_lo > 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    const double J_star = 0.5 * (lo + hi);
    // A sign flip of Re det Q without a vanishing level is not a crossing.
    const auto [gap, norm] = gap_at(J_star);
    if (std::abs(gap) <= 1e-6 * std::max(norm, 1.0)) out.push_back(J_star);
  }
  if (sweep.rows.back().signed_mid_gap == 0.0) out.push_back(sweep.rows.back().J);
  return out;
}

}  // namespace gssh
