#pragma once

// Edge-state profiles of an open chain. The four single-edge ansatz states put
// probability e^{-4 x / xi} on one sublattice, with x the distance (in cells)
// from the left or right end; hybrids are superpositions of an LC/RM or LM/RC pair.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>

#include "gssh/lattice.hpp"

namespace gssh {

enum class EdgeKind { LC, LM, RC, RM, HybridLCRM, HybridLMRC, Bulk };
enum class Side { Left, Right };

std::string_view to_string(EdgeKind k);
/// Parses "LC", "lm", ... (case-insensitive). Throws ConfigError.
EdgeKind parse_edge_kind(std::string_view s);

bool is_single_edge(EdgeKind k);
Sublattice edge_sublattice(EdgeKind single);
Side edge_side(EdgeKind single);

struct EdgeStateLabel {
  EdgeKind kind = EdgeKind::Bulk;
  std::optional<double> xi;   // localization length in cells; empty for Bulk
  double fit_quality = 0.0;   // R^2 of the exponential profile fit, clamped to [0, 1]
  double cavity_weight = 0.0;
  double captured = 0.0;      // norm fraction captured by the assigned ansatz (or pair)
};

struct ProfileFit {
  double xi = 0.0;
  double r2 = 0.0;
  bool localized = false;  // decays towards the bulk and drops >= 100x across the chain
};

/// Fits per-cell probabilities (any normalisation) to e^{-4 x / xi}, where x counts
/// cells from the chosen end. Log-linear least squares weighted by the probabilities;
/// R^2 is measured on the normalised probabilities themselves.
ProfileFit fit_edge_profile(std::span<const double> cell_probs, Side side);

/// Normalised per-cell ansatz probabilities for localization length xi.
Eigen::VectorXd edge_profile(std::size_t n_cells, double xi, Side side);

/// Unit-norm single-edge ansatz vector in the 2N basis. Amplitudes are sqrt of the
/// profile; when `phase_reference` is given, each site borrows its phase.
Eigen::VectorXcd edge_ansatz(EdgeKind single, std::size_t n_cells, double xi,
                             const Eigen::VectorXcd* phase_reference = nullptr);

/// Classifies a unit-norm state as one of the four edge types, a hybrid pair, or Bulk.
EdgeStateLabel classify_edge_state(const Eigen::VectorXcd& psi, double tol_sublattice = 0.9,
                                   double tol_fit = 0.95);

}  // namespace gssh
