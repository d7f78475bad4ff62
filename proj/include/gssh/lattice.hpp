#pragma once

// Real-space finite chains in the interleaved basis (a_1, b_1, a_2, b_2, ..., a_N, b_N):
// even indices are cavity sites, odd indices mechanical sites.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "gssh/params.hpp"

namespace gssh {

enum class Boundary { Open, Periodic };
enum class Sublattice { Cavity, Mechanical };

/// Dense chains are capped at this many cells.
inline constexpr std::size_t kMaxCells = 4096;

/// Zero-based basis index of site a_cell or b_cell (cell is one-based).
std::size_t site_index(Sublattice s, std::size_t cell);

class ChainHamiltonian {
 public:
  std::size_t n_cells() const { return n_cells_; }
  std::size_t dim() const { return 2 * n_cells_; }
  Boundary boundary() const { return boundary_; }
  double detuning() const { return detuning_; }
  const CouplingParams& params() const { return params_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  /// Off-diagonal block Q with Q(j, k) = <a_j|H|b_k>. H is [[u, Q], [Q^H, 0]] in sublattice order.
  Eigen::MatrixXcd chiral_block() const;

 private:
  friend ChainHamiltonian build_chain(std::size_t, Boundary, const CouplingParams&, double);

  std::size_t n_cells_ = 0;
  Boundary boundary_ = Boundary::Open;
  double detuning_ = 0.0;
  CouplingParams params_;
  Eigen::MatrixXcd matrix_;
};

/// <a_j|H|b_j> = J e^{i phi}, <a_{j+1}|H|b_j> = v, <b_{j+1}|H|a_j> = z, <a_j|H|a_j> = u.
/// Periodic chains wrap the j = N terms onto cell 1; coincident entries accumulate.
/// Throws InvalidSize unless 1 <= n_cells <= kMaxCells.
ChainHamiltonian build_chain(std::size_t n_cells, Boundary boundary, const CouplingParams& p,
                             double u = 0.0);

/// Gamma = diag(+1 cavity, -1 mechanical).
Eigen::VectorXd chiral_operator(std::size_t n_cells);

struct EigenSystem {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXcd states;   // column i pairs with energies(i)
  double norm = 0.0;         // spectral norm of H
};

/// Full decomposition. Inside every degenerate cluster (spacing <= 1e-9 |H|) the basis is
/// rebuilt by pivoted Gram-Schmidt on site vectors, so it is reproducible; every column has
/// its largest-magnitude component real and positive. Throws ConvergenceFailure if the
/// residual or orthonormality checks fail.
EigenSystem eigensystem(const ChainHamiltonian& h);
EigenSystem eigensystem(const Eigen::MatrixXcd& h);

struct SweepRow {
  double J = 0.0;
  Eigen::VectorXd energies;
  double signed_mid_gap = 0.0;  // E_{N+1} signed by Re det Q; changes sign at zero-mode crossings
};

struct SpectrumSweep {
  std::size_t n_cells = 0;
  CouplingParams base;  // J is overwritten per row
  double detuning = 0.0;
  std::vector<SweepRow> rows;
};

/// Open-chain spectra for J = J_min + i (J_max - J_min) / (steps - 1), i = 0 .. steps - 1.
SpectrumSweep spectrum_sweep(std::size_t n_cells, const CouplingParams& base, double J_min,
                             double J_max, std::size_t steps, double u = 0.0);

/// Mid-gap value used to locate zero-mode crossings at a single J.
double signed_mid_gap(const ChainHamiltonian& h, const EigenSystem& es);

/// J values where the two mid-spectrum levels cross zero, refined by bisection
/// (at most 40 iterations, stopping once the bracket is below tol).
std::vector<double> find_zero_mode_crossings(const SpectrumSweep& sweep, double tol = 1e-10);

}  // namespace gssh
