#pragma once

// Single-excitation dynamics: exact evolution under a fixed chain and
// piecewise-constant midpoint propagation along a pump schedule.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "gssh/edge_state.hpp"
#include "gssh/lattice.hpp"
#include "gssh/schedule.hpp"

namespace gssh {

struct StateVector {
  Eigen::VectorXcd amplitudes;
  double time = 0.0;

  std::size_t n_cells() const { return static_cast<std::size_t>(amplitudes.size()) / 2; }
  Eigen::VectorXd probabilities() const { return amplitudes.cwiseAbs2(); }
};

/// Excitation on a single site (cell is one-based).
StateVector site_state(std::size_t n_cells, Sublattice s, std::size_t cell);

/// psi(t) = exp(-i H t) psi0 through the eigensystem.
StateVector evolve_constant(const ChainHamiltonian& h, const StateVector& psi0, double t);
StateVector evolve_constant(const EigenSystem& es, const StateVector& psi0, double t);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> probabilities;  // P_i(t) per recorded time
  std::vector<Eigen::VectorXcd> states;        // amplitudes per recorded time
  StateVector final_state;
  double dt = 0.0;               // step actually used
  double norm_drift = 0.0;       // max | |psi|^2 - 1 | over the run
  double halving_delta = -1.0;   // max |P(dt) - P(dt/2)| at the end; < 0 when not checked
};

struct EvolveOptions {
  bool check_convergence = true;
  double convergence_tol = 1e-4;
  std::size_t record_every = 1;
};

/// Steps psi0 (taken at time psi0.time) to psi0.time + duration with exp(-i H(t_mid) dt).
/// The step is shrunk so that it divides the duration. Throws StepTooLarge if halving the
/// step moves any final probability by more than options.convergence_tol.
Trajectory evolve_schedule(const PumpSchedule& schedule, std::size_t n_cells,
                           const StateVector& psi0, double duration, double dt,
                           const EvolveOptions& options = {});

struct SpectrumSlice {
  double t = 0.0;
  Eigen::VectorXd energies;        // ascending
  std::vector<int> band;           // lineage id of each sorted level
  std::vector<bool> broken;        // level could not be matched to the previous slice
  std::vector<EdgeStateLabel> labels;
};

/// Eigensystems of H(t) at n_times points t_i = i T / (n_times - 1) over one period.
/// Levels are connected between slices by greedy maximal overlap (|<prev|cur>|^2 >= 0.5).
std::vector<SpectrumSlice> instantaneous_spectrum(const PumpSchedule& schedule,
                                                  std::size_t n_cells, std::size_t n_times);

enum class FidelityTarget {
  EdgeEigenstate,  // target-sublattice component of the instantaneous edge eigenstates
  Ansatz,          // exponential ansatz with xi fitted to that component
};

/// Edge component of kind `single` in the eigenstates of h: the dominant direction of the
/// target-sublattice projection of the two eigenstates with the most weight on that edge.
Eigen::VectorXcd instantaneous_edge_state(const ChainHamiltonian& h, EdgeKind single);

/// |<target|psi(t*)>|^2 with psi(t*) the recorded state nearest to at_time.
double pump_fidelity(const Trajectory& traj, const PumpSchedule& schedule, std::size_t n_cells,
                     EdgeKind target, double at_time,
                     FidelityTarget mode = FidelityTarget::EdgeEigenstate);

}  // namespace gssh
