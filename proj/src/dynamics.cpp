#include "gssh/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "gssh/errors.hpp"
#include "gssh/kernels.hpp"

namespace gssh {

namespace {

// exp(-i H dt) applied through split-complex kernels: psi <- V diag(e^{-i E dt}) V^H psi.
class Propagator {
 public:
  explicit Propagator(std::size_t dim)
      : dim_(dim), v_re_(dim * dim), v_im_(dim * dim), x_re_(dim), x_im_(dim), y_re_(dim),
        y_im_(dim) {}

  void load(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw ConvergenceFailure("eigensolver failed");
    energies_ = solver.eigenvalues();
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        const cplx c = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        v_re_[i * dim_ + j] = c.real();
        v_im_[i * dim_ + j] = c.imag();
      }
  }

  void apply(double dt, Eigen::VectorXcd& psi) {
    const auto& k = kernels::active();
    const kernels::SplitMatrixView v{v_re_.data(), v_im_.data(), dim_};
    for (std::size_t i = 0; i < dim_; ++i) {
      x_re_[i] = psi(static_cast<Eigen::Index>(i)).real();
      x_im_[i] = psi(static_cast<Eigen::Index>(i)).imag();
    }
    k.cmatvec(v, true, x_re_.data(), x_im_.data(), y_re_.data(), y_im_.data());
    for (std::size_t i = 0; i < dim_; ++i) {
      const cplx phase = std::polar(1.0, -energies_(static_cast<Eigen::Index>(i)) * dt);
      const cplx c = cplx(y_re_[i], y_im_[i]) * phase;
      y_re_[i] = c.real();
      y_im_[i] = c.imag();
    }
    k.cmatvec(v, false, y_re_.data(), y_im_.data(), x_re_.data(), x_im_.data());
    for (std::size_t i = 0; i < dim_; ++i) psi(static_cast<Eigen::Index>(i)) = cplx(x_re_[i], x_im_[i]);
  }

 private:
  std::size_t dim_;
  Eigen::VectorXd energies_;
  std::vector<double> v_re_, v_im_, x_re_, x_im_, y_re_, y_im_;
};

void check_state(const StateVector& psi, std::size_t dim) {
  if (static_cast<std::size_t>(psi.amplitudes.size()) != dim)
    throw DimensionMismatch("state has " + std::to_string(psi.amplitudes.size()) +
                            " components, chain needs " + std::to_string(dim));
  if (std::abs(psi.amplitudes.squaredNorm() - 1.0) > 1e-8)
    throw ConfigError("initial state must have unit norm");
}

struct RunResult {
  Eigen::VectorXcd psi;
  double norm_drift = 0.0;
};

template <typename Recorder>
RunResult propagate(const PumpSchedule& schedule, std::size_t n_cells, const StateVector& psi0,
                    std::size_t steps, double dt, Recorder&& record) {
  Propagator prop(2 * n_cells);
  Eigen::VectorXcd psi = psi0.amplitudes;
  double drift = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_mid = psi0.time + (static_cast<double>(s) + 0.5) * dt;
    prop.load(hamiltonian_at(schedule, n_cells, t_mid).matrix());
    prop.apply(dt, psi);
    drift = std::max(drift, std::abs(psi.squaredNorm() - 1.0));
    record(s + 1, psi);
  }
  return {psi, drift};
}

}  // namespace

StateVector site_state(std::size_t n_cells, Sublattice s, std::size_t cell) {
  if (cell < 1 || cell > n_cells) throw ConfigError("cell index out of range");
  StateVector out;
  out.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * n_cells));
  out.amplitudes(static_cast<Eigen::Index>(site_index(s, cell))) = 1.0;
  return out;
}

StateVector evolve_constant(const ChainHamiltonian& h, const StateVector& psi0, double t) {
  check_state(psi0, h.dim());
  return evolve_constant(eigensystem(h), psi0, t);
}

StateVector evolve_constant(const EigenSystem& es, const StateVector& psi0, double t) {
  if (psi0.amplitudes.size() != es.energies.size())
    throw DimensionMismatch("state and eigensystem dimensions differ");
  Eigen::VectorXcd c = es.states.adjoint() * psi0.amplitudes;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -es.energies(i) * t);
  StateVector out;
  out.amplitudes = es.states * c;
  out.time = psi0.time + t;
  return out;
}

Trajectory evolve_schedule(const PumpSchedule& schedule, std::size_t n_cells,
                           const StateVector& psi0, double duration, double dt,
                           const EvolveOptions& options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("t_end must be positive");
  if (options.record_every == 0) throw ConfigError("record_every must be positive");
  check_state(psi0, 2 * n_cells);

  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const double h = duration / static_cast<double>(steps);

  Trajectory traj;
  traj.dt = h;
  auto push = [&](double t, const Eigen::VectorXcd& psi) {
    traj.times.push_back(t);
    traj.states.push_back(psi);
    traj.probabilities.push_back(psi.cwiseAbs2());
  };
  push(psi0.time, psi0.amplitudes);

  const RunResult run =
      propagate(schedule, n_cells, psi0, steps, h, [&](std::size_t s, const Eigen::VectorXcd& psi) {
        if (s % options.record_every == 0 || s == steps)
          push(psi0.time + static_cast<double>(s) * h, psi);
      });
  traj.final_state.amplitudes = run.psi;
  traj.final_state.time = psi0.time + duration;
  traj.norm_drift = run.norm_drift;

  if (options.check_convergence) {
    const RunResult fine =
        propagate(schedule, n_cells, psi0, 2 * steps, 0.5 * h, [](std::size_t, const auto&) {});
    traj.halving_delta = (fine.psi.cwiseAbs2() - run.psi.cwiseAbs2()).cwiseAbs().maxCoeff();
    if (traj.halving_delta > options.convergence_tol)
      throw StepTooLarge("halving dt moved final probabilities by " +
                         std::to_string(traj.halving_delta));
  }
  return traj;
}

std::vector<SpectrumSlice> instantaneous_spectrum(const PumpSchedule& schedule,
                                                  std::size_t n_cells, std::size_t n_times) {
  if (n_times < 8) throw ConfigError("n_times must be at least 8");
  const double period = schedule.period();
  std::vector<SpectrumSlice> slices(n_times);
  Eigen::MatrixXcd prev_states;
  std::vector<int> prev_band;
  int next_id = 0;

  for (std::size_t s = 0; s < n_times; ++s) {
    SpectrumSlice& slice = slices[s];
    slice.t = period * static_cast<double>(s) / static_cast<double>(n_times - 1);
    const EigenSystem es = eigensystem(hamiltonian_at(schedule, n_cells, slice.t));
    const auto dim = static_cast<std::size_t>(es.energies.size());
    slice.energies = es.energies;
    slice.band.assign(dim, -1);
    slice.broken.assign(dim, false);
    for (std::size_t i = 0; i < dim; ++i)
      slice.labels.push_back(classify_edge_state(es.states.col(static_cast<Eigen::Index>(i))));

    if (s == 0) {
      for (std::size_t i = 0; i < dim; ++i) slice.band[i] = next_id++;
    } else {
      const Eigen::MatrixXd overlap = (prev_states.adjoint() * es.states).cwiseAbs2();
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      for (std::size_t p = 0; p < dim; ++p)
        for (std::size_t c = 0; c < dim; ++c)
          if (overlap(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) >= 0.5)
            pairs.emplace_back(overlap(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)), p, c);
      std::stable_sort(pairs.begin(), pairs.end(),
                       [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
      std::vector<bool> prev_used(dim, false);
      for (const auto& [ov, p, c] : pairs) {
        if (prev_used[p] || slice.band[c] >= 0) continue;
        prev_used[p] = true;
        slice.band[c] = prev_band[p];
      }
      for (std::size_t c = 0; c < dim; ++c) {
        if (slice.band[c] < 0) {
          slice.band[c] = next_id++;
          slice.broken[c] = true;
        }
      }
    }
    prev_states = es.states;
    prev_band = slice.band;
  }
  return slices;
}

Eigen::VectorXcd instantaneous_edge_state(const ChainHamiltonian& h, EdgeKind single) {
  if (!is_single_edge(single)) throw ConfigError("target must be LC, LM, RC or RM");
  const EigenSystem es = eigensystem(h);
  const std::size_t n = h.n_cells();
  const Sublattice sub = edge_sublattice(single);
  const Side side = edge_side(single);

  // Weight of each eigenstate on the target sublattice in the target half of the chain.
  const auto dim = static_cast<std::size_t>(es.energies.size());
  std::vector<double> weight(dim, 0.0);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t j = 1; j <= n; ++j) {
      const bool left_half = 2 * j <= n + (n % 2);
      if ((side == Side::Left) == left_half)
        weight[c] += std::norm(es.states(static_cast<Eigen::Index>(site_index(sub, j)),
                                         static_cast<Eigen::Index>(c)));
    }
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });

  const std::size_t keep = std::min<std::size_t>(2, dim);
  Eigen::MatrixXcd projected(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(keep));
  for (std::size_t m = 0; m < keep; ++m) {
    Eigen::VectorXcd col = es.states.col(static_cast<Eigen::Index>(order[m]));
    for (Eigen::Index i = 0; i < col.size(); ++i)
      if ((i % 2 == 0) != (sub == Sublattice::Cavity)) col(i) = 0.0;
    projected.col(static_cast<Eigen::Index>(m)) = col;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(projected, Eigen::ComputeThinU);
  Eigen::VectorXcd e = svd.matrixU().col(0);
  return e / e.norm();
}

double pump_fidelity(const Trajectory& traj, const PumpSchedule& schedule, std::size_t n_cells,
                     EdgeKind target, double at_time, FidelityTarget mode) {
  if (traj.times.empty()) throw ConfigError("empty trajectory");
  const double span = traj.times.back() - traj.times.front();
  const double slack = 1e-9 * std::max(1.0, std::abs(span));
  if (at_time < traj.times.front() - slack || at_time > traj.times.back() + slack)
    throw ConfigError("at_time lies outside the trajectory");

  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), at_time);
  std::size_t idx = static_cast<std::size_t>(it - traj.times.begin());
  if (idx == traj.times.size() ||
      (idx > 0 && std::abs(traj.times[idx - 1] - at_time) <= std::abs(traj.times[idx] - at_time)))
    idx = (idx == 0) ? 0 : idx - 1;
  const Eigen::VectorXcd& psi = traj.states[idx];
  if (static_cast<std::size_t>(psi.size()) != 2 * n_cells)
    throw DimensionMismatch("trajectory and chain dimensions differ");

  const ChainHamiltonian h = hamiltonian_at(schedule, n_cells, traj.times[idx]);
  const Eigen::VectorXcd edge = instantaneous_edge_state(h, target);
  if (mode == FidelityTarget::EdgeEigenstate) return std::norm(edge.dot(psi));

  std::vector<double> probs(n_cells);
  const Sublattice sub = edge_sublattice(target);
  for (std::size_t j = 1; j <= n_cells; ++j)
    probs[j - 1] = std::norm(edge(static_cast<Eigen::Index>(site_index(sub, j))));
  const ProfileFit fit = fit_edge_profile(probs, edge_side(target));
  if (!fit.localized) return 0.0;
  const Eigen::VectorXcd ansatz = edge_ansatz(target, n_cells, fit.xi, &edge);
  return std::norm(ansatz.dot(psi));
}

}  // namespace gssh
