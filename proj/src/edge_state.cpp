#include "gssh/edge_state.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "gssh/errors.hpp"

namespace gssh {

namespace {

// A profile must fall by at least this factor between the two ends to count as localized.
constexpr double kMinEdgeContrast = 100.0;

std::vector<double> sublattice_probs(const Eigen::VectorXcd& psi, Sublattice s) {
  const std::size_t n = static_cast<std::size_t>(psi.size()) / 2;
  std::vector<double> out(n);
  for (std::size_t j = 1; j <= n; ++j) out[j - 1] = std::norm(psi(site_index(s, j)));
  return out;
}

double distance_from_edge(std::size_t cell, std::size_t n, Side side) {
  return side == Side::Left ? static_cast<double>(cell - 1) : static_cast<double>(n - cell);
}

struct Candidate {
  EdgeKind kind;
  ProfileFit fit;
  double captured = 0.0;
  double side_fraction = 0.0;
};

}  // namespace

std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::LC: return "LC";
    case EdgeKind::LM: return "LM";
    case EdgeKind::RC: return "RC";
    case EdgeKind::RM: return "RM";
    case EdgeKind::HybridLCRM: return "HybridLCRM";
    case EdgeKind::HybridLMRC: return "HybridLMRC";
    case EdgeKind::Bulk: return "Bulk";
  }
  return "Bulk";
}

EdgeKind parse_edge_kind(std::string_view s) {
  std::string up(s);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (EdgeKind k : {EdgeKind::LC, EdgeKind::LM, EdgeKind::RC, EdgeKind::RM, EdgeKind::HybridLCRM,
                     EdgeKind::HybridLMRC, EdgeKind::Bulk}) {
    std::string name(to_string(k));
    for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (name == up) return k;
  }
  throw ConfigError("unknown edge type '" + std::string(s) + "'");
}

bool is_single_edge(EdgeKind k) {
  return k == EdgeKind::LC || k == EdgeKind::LM || k == EdgeKind::RC || k == EdgeKind::RM;
}

Sublattice edge_sublattice(EdgeKind single) {
  return (single == EdgeKind::LC || single == EdgeKind::RC) ? Sublattice::Cavity
                                                            : Sublattice::Mechanical;
}

Side edge_side(EdgeKind single) {
  return (single == EdgeKind::LC || single == EdgeKind::LM) ? Side::Left : Side::Right;
}

ProfileFit fit_edge_profile(std::span<const double> cell_probs, Side side) {
  const std::size_t n = cell_probs.size();
  ProfileFit fit;
  double total = 0.0;
  for (double p : cell_probs) total += p;
  if (n < 2 || !(total > 0.0)) return fit;

  std::vector<double> prob(n);
  double pmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prob[i] = cell_probs[i] / total;
    pmax = std::max(pmax, prob[i]);
  }

  // Weighted least squares for log P = c + s x.
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double p = prob[j - 1];
    if (p <= 1e-300 * pmax) continue;
    const double x = distance_from_edge(j, n, side);
    const double y = std::log(p);
    sw += p;
    sx += p * x;
    sy += p * y;
    sxx += p * x * x;
    sxy += p * x * y;
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 1e-300)) {
    // All weight on a single cell: infinitely sharp edge.
    const double x0 = sx / sw;
    if (x0 == 0.0) {
      fit.xi = 4.0 / std::log(1e300);
      fit.r2 = 1.0;
      fit.localized = true;
    }
    return fit;
  }
  const double slope = (sw * sxy - sx * sy) / det;
  if (!(slope < 0.0)) return fit;

  fit.xi = -4.0 / slope;
  const Eigen::VectorXd model = edge_profile(n, fit.xi, side);
  const double mean = 1.0 / static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_res += (prob[i] - model(static_cast<Eigen::Index>(i))) * (prob[i] - model(static_cast<Eigen::Index>(i)));
    ss_tot += (prob[i] - mean) * (prob[i] - mean);
  }
  fit.r2 = (ss_tot > 0.0) ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
  const double xi_max = 4.0 * static_cast<double>(n - 1) / std::log(kMinEdgeContrast);
  fit.localized = fit.xi <= xi_max;
  return fit;
}

Eigen::VectorXd edge_profile(std::size_t n_cells, double xi, Side side) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(n_cells));
  for (std::size_t j = 1; j <= n_cells; ++j)
    p(static_cast<Eigen::Index>(j - 1)) = std::exp(-4.0 * distance_from_edge(j, n_cells, side) / xi);
  return p / p.sum();
}

Eigen::VectorXcd edge_ansatz(EdgeKind single, std::size_t n_cells, double xi,
                             const Eigen::VectorXcd* phase_reference) {
  if (!is_single_edge(single)) throw ConfigError("edge ansatz needs LC, LM, RC or RM");
  if (phase_reference != nullptr && static_cast<std::size_t>(phase_reference->size()) != 2 * n_cells)
    throw DimensionMismatch("phase reference has the wrong dimension");
  const Eigen::VectorXd profile = edge_profile(n_cells, xi, edge_side(single));
  const Sublattice s = edge_sublattice(single);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * n_cells));
  for (std::size_t j = 1; j <= n_cells; ++j) {
    const auto i = static_cast<Eigen::Index>(site_index(s, j));
    const double amp = std::sqrt(profile(static_cast<Eigen::Index>(j - 1)));
    cplx phase(1.0, 0.0);
    if (phase_reference != nullptr && std::abs((*phase_reference)(i)) > 0.0)
      phase = (*phase_reference)(i) / std::abs((*phase_reference)(i));
    out(i) = amp * phase;
  }
  return out;
}

EdgeStateLabel classify_edge_state(const Eigen::VectorXcd& psi_in, double tol_sublattice,
                                   double tol_fit) {
  if (psi_in.size() == 0 || psi_in.size() % 2 != 0)
    throw DimensionMismatch("state must have 2N components");
  const double nrm = psi_in.norm();
  if (!(nrm > 0.0)) throw ConfigError("state has zero norm");
  const Eigen::VectorXcd psi = psi_in / nrm;
  const std::size_t n = static_cast<std::size_t>(psi.size()) / 2;

  const std::vector<double> pa = sublattice_probs(psi, Sublattice::Cavity);
  const std::vector<double> pb = sublattice_probs(psi, Sublattice::Mechanical);
  double wa = 0.0, wb = 0.0;
  for (double p : pa) wa += p;
  for (double p : pb) wb += p;

  EdgeStateLabel label;
  label.cavity_weight = wa;

  std::array<Candidate, 4> cands{};
  const std::array<EdgeKind, 4> kinds{EdgeKind::LC, EdgeKind::LM, EdgeKind::RC, EdgeKind::RM};
  for (std::size_t c = 0; c < 4; ++c) {
    const EdgeKind k = kinds[c];
    const bool cavity = edge_sublattice(k) == Sublattice::Cavity;
    const std::vector<double>& probs = cavity ? pa : pb;
    const double weight = cavity ? wa : wb;
    Candidate& cand = cands[c];
    cand.kind = k;
    if (!(weight > 0.0)) continue;
    double near_half = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const bool left_half = 2 * j <= n + (n % 2);
      if ((edge_side(k) == Side::Left) == left_half) near_half += probs[j - 1];
    }
    cand.side_fraction = near_half / weight;
    cand.fit = fit_edge_profile(probs, edge_side(k));
    if (!cand.fit.localized) continue;
    // Overlap with the ansatz dressed with psi's own phases.
    const Eigen::VectorXd model = edge_profile(n, cand.fit.xi, edge_side(k));
    double amp = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      amp += std::sqrt(model(static_cast<Eigen::Index>(j)) * probs[j]);
    cand.captured = amp * amp;
  }

  // Single edge states.
  const Candidate* best_single = nullptr;
  for (const Candidate& cand : cands) {
    const double weight = edge_sublattice(cand.kind) == Sublattice::Cavity ? wa : wb;
    if (weight >= tol_sublattice && cand.side_fraction >= tol_sublattice && cand.fit.localized &&
        (best_single == nullptr || cand.captured > best_single->captured))
      best_single = &cand;
  }
  if (best_single != nullptr) {
    label.kind = best_single->kind;
    label.xi = best_single->fit.xi;
    label.fit_quality = best_single->fit.r2;
    label.captured = best_single->captured;
    return label;
  }

  // Hybrid pairs: (LC, RM) and (LM, RC).
  const Candidate& lc = cands[0];
  const Candidate& lm = cands[1];
  const Candidate& rc = cands[2];
  const Candidate& rm = cands[3];
  struct Pair {
    EdgeKind kind;
    const Candidate& first;
    const Candidate& second;
  };
  const Pair pairs[] = {{EdgeKind::HybridLCRM, lc, rm}, {EdgeKind::HybridLMRC, lm, rc}};
  const Pair* best_pair = nullptr;
  double best_capture = 0.0;
  for (const Pair& pr : pairs) {
    if (!pr.first.fit.localized || !pr.second.fit.localized) continue;
    const double cap = pr.first.captured + pr.second.captured;
    const bool singles_fail = pr.first.captured < tol_fit && pr.second.captured < tol_fit;
    if (cap >= tol_fit && singles_fail && cap > best_capture) {
      best_pair = &pr;
      best_capture = cap;
    }
  }
  if (best_pair != nullptr) {
    const double w1 = best_pair->first.captured, w2 = best_pair->second.captured;
    label.kind = best_pair->kind;
    label.xi = (w1 * best_pair->first.fit.xi + w2 * best_pair->second.fit.xi) / (w1 + w2);
    label.fit_quality = std::min(best_pair->first.fit.r2, best_pair->second.fit.r2);
    label.captured = best_capture;
    return label;
  }

  label.kind = EdgeKind::Bulk;
  for (const Candidate& cand : cands) {
    label.fit_quality = std::max(label.fit_quality, cand.fit.r2);
    label.captured = std::max(label.captured, cand.captured);
  }
  return label;
}

}  // namespace gssh
