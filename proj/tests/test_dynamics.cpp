#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gssh/dynamics.hpp"
#include "gssh/errors.hpp"

using namespace gssh;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double right_end(const Eigen::VectorXd& p) { return p(p.size() - 2) + p(p.size() - 1); }

// Largest right-end probability over t in [0, t_end] for a quench from a_1.
double max_right_transfer(const CouplingParams& p, double t_end) {
  const auto es = eigensystem(build_chain(8, Boundary::Open, p));
  const StateVector psi0 = site_state(8, Sublattice::Cavity, 1);
  double best = 0.0;
  for (int i = 0; i <= 2000; ++i)
    best = std::max(best, right_end(evolve_constant(es, psi0, t_end * i / 2000.0).probabilities()));
  return best;
}

double first_arrival(const CouplingParams& p, Sublattice start, double threshold, double t_end) {
  const auto es = eigensystem(build_chain(8, Boundary::Open, p));
  const StateVector psi0 = site_state(8, start, 1);
  for (int i = 0; i <= 20000; ++i) {
    const double t = t_end * i / 20000.0;
    if (right_end(evolve_constant(es, psi0, t).probabilities()) >= threshold) return t;
  }
  return INFINITY;
}

}  // namespace

TEST_CASE("site states") {
  const StateVector s = site_state(4, Sublattice::Mechanical, 4);
  CHECK(s.amplitudes.size() == 8);
  CHECK(s.amplitudes(7) == cplx(1.0, 0.0));
  CHECK(s.n_cells() == 4);
  CHECK_THROWS_AS(site_state(4, Sublattice::Cavity, 5), ConfigError);
  CHECK_THROWS_AS(site_state(4, Sublattice::Cavity, 0), ConfigError);
}

TEST_CASE("constant evolution basics") {
  const auto h = build_chain(6, Boundary::Open, {0.7, 0.3, 1.0, 0.4}, 0.2);
  const StateVector psi0 = site_state(6, Sublattice::Cavity, 2);
  CHECK((evolve_constant(h, psi0, 0.0).amplitudes - psi0.amplitudes).norm() < 1e-14);

  const StateVector later = evolve_constant(h, psi0, 3.7);
  CHECK(later.time == Approx(3.7));
  CHECK(std::abs(later.amplitudes.squaredNorm() - 1.0) < 1e-10);
  const StateVector back = evolve_constant(h, later, -3.7);
  CHECK((back.amplitudes - psi0.amplitudes).norm() < 1e-9);

  const cplx e0 = psi0.amplitudes.dot(h.matrix() * psi0.amplitudes);
  const cplx e1 = later.amplitudes.dot(h.matrix() * later.amplitudes);
  CHECK(std::abs(e0 - e1) < 1e-8);

  CHECK_THROWS_AS(evolve_constant(h, site_state(5, Sublattice::Cavity, 1), 1.0), DimensionMismatch);
  StateVector bad = psi0;
  bad.amplitudes *= 2.0;
  CHECK_THROWS_AS(evolve_constant(h, bad, 1.0), ConfigError);
}

TEST_CASE("two-level Rabi oscillation") {
  const double J = 0.8;
  const auto h = build_chain(1, Boundary::Open, {J, 0.0, 1.0, 0.0});
  const StateVector psi0 = site_state(1, Sublattice::Cavity, 1);
  for (double t : {0.1, 0.9, 2.0, 7.3}) {
    const Eigen::VectorXd p = evolve_constant(h, psi0, t).probabilities();
    CHECK(p(0) == Approx(std::cos(J * t) * std::cos(J * t)).epsilon(1e-12));
    CHECK(p(1) == Approx(std::sin(J * t) * std::sin(J * t)).epsilon(1e-12));
  }
}

TEST_CASE("injected cavity stays localized when J and z are small") {
  const auto es = eigensystem(build_chain(8, Boundary::Open, {0.1, 0.0, 1.0, 0.1}));
  const StateVector psi0 = site_state(8, Sublattice::Cavity, 1);
  double lowest = 1.0;
  for (int i = 0; i <= 1000; ++i) lowest = std::min(lowest, evolve_constant(es, psi0, 0.05 * i).probabilities()(0));
  CHECK(lowest >= 0.5);
}

TEST_CASE("transfer to the far end peaks at the critical coupling") {
  const double v = 1.0, z = 0.1, jc = v + z;
  const double at = max_right_transfer({jc, 0.0, v, z}, 50.0);
  CHECK(at > max_right_transfer({jc - 0.1, 0.0, v, z}, 50.0));
  CHECK(at > max_right_transfer({jc + 0.1, 0.0, v, z}, 50.0));
}

TEST_CASE("large hoppings carry the excitation across faster") {
  const double fast = first_arrival({11.0, 0.0, 1.0, 10.0}, Sublattice::Mechanical, 0.3, 50.0);
  const double slow = first_arrival({1.1, 0.0, 1.0, 0.1}, Sublattice::Cavity, 0.3, 50.0);
  REQUIRE(std::isfinite(slow));
  CHECK(fast < slow);
}

TEST_CASE("schedules follow their defining modulation and repeat every period") {
  const double A = 1.1, omega = 2 * kPi / 100;
  const auto intra = PumpSchedule::intracell(A, omega, {0.0, 0.0, 1.0, 0.1});
  const auto inter = PumpSchedule::intercell(A, omega, {0.1, 0.0, 1.0, 0.0});
  CHECK(intra.period() == Approx(100.0));
  for (double t : {0.0, 13.0, 50.0, 77.7}) {
    const InstantParams a = intra.at(t);
    CHECK(a.u == Approx(0.5 * A * std::sin(omega * t)));
    CHECK(a.p.J == Approx(A * (1 - std::cos(omega * t))));
    CHECK(a.p.v == 1.0);
    CHECK(a.p.z == 0.1);
    const InstantParams b = inter.at(t);
    CHECK(b.p.J == 0.1);
    CHECK(b.p.v == Approx(A * (1 + std::cos(omega * t))));
    CHECK(b.p.z == Approx(A * (1 - std::cos(omega * t))));

    for (const auto* s : {&intra, &inter}) {
      const Eigen::MatrixXcd h0 = hamiltonian_at(*s, 8, t).matrix();
      const Eigen::MatrixXcd h1 = hamiltonian_at(*s, 8, t + s->period()).matrix();
      CHECK((h0 - h1).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  CHECK_THROWS_AS(PumpSchedule::intracell(A, 0.0, {0.0, 0.0, 1.0, 0.1}), ConfigError);
  CHECK(parse_schedule_kind("eq26") == ScheduleKind::Intracell);
  CHECK(parse_schedule_kind("intercell") == ScheduleKind::Intercell);
  CHECK_THROWS_AS(parse_schedule_kind("eq99"), ConfigError);
}

TEST_CASE("frozen schedule reproduces constant evolution") {
  const CouplingParams p{0.6, 0.2, 1.0, 0.3};
  const auto frozen = PumpSchedule::custom(1e-9, p, [p](double) { return InstantParams{0.15, p}; });
  const StateVector psi0 = site_state(5, Sublattice::Mechanical, 2);
  EvolveOptions opt;
  opt.check_convergence = false;
  const Trajectory traj = evolve_schedule(frozen, 5, psi0, 12.0, 0.05, opt);
  const StateVector exact = evolve_constant(build_chain(5, Boundary::Open, p, 0.15), psi0, 12.0);
  CHECK((traj.final_state.amplitudes - exact.amplitudes).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(traj.norm_drift < 1e-8);
}

TEST_CASE("pump trajectories are unitary and converged") {
  const auto s = PumpSchedule::intracell(1.1, 2 * kPi / 100, {0.0, 0.0, 1.0, 0.1});
  EvolveOptions opt;
  opt.record_every = 20;
  const Trajectory traj = evolve_schedule(s, 8, site_state(8, Sublattice::Cavity, 1), 100.0, 0.05, opt);
  CHECK(traj.norm_drift < 1e-8);
  CHECK(traj.halving_delta >= 0.0);
  CHECK(traj.halving_delta < 1e-4);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == Approx(100.0));
  CHECK(traj.times.size() == 101);
  for (const auto& p : traj.probabilities) CHECK(std::abs(p.sum() - 1.0) < 1e-8);
  for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
}

TEST_CASE("coarse steps trip the convergence check") {
  const auto s = PumpSchedule::intracell(1.1, 2 * kPi / 10, {0.0, 0.0, 1.0, 0.1});
  CHECK_THROWS_AS(evolve_schedule(s, 8, site_state(8, Sublattice::Cavity, 1), 10.0, 2.5), StepTooLarge);
  CHECK_THROWS_AS(evolve_schedule(s, 8, site_state(8, Sublattice::Cavity, 1), 10.0, 0.0), ConfigError);
  CHECK_THROWS_AS(evolve_schedule(s, 8, site_state(7, Sublattice::Cavity, 1), 10.0, 0.1), DimensionMismatch);
}

TEST_CASE("intracell pump moves LC to RM and not to RC") {
  const double T = 100.0;
  const auto s = PumpSchedule::intracell(1.1, 2 * kPi / T, {0.0, 0.0, 1.0, 0.1});
  EvolveOptions opt;
  opt.record_every = 100;
  const Trajectory traj = evolve_schedule(s, 8, site_state(8, Sublattice::Cavity, 1), 2 * T, T / 2000, opt);
  const double rm = pump_fidelity(traj, s, 8, EdgeKind::RM, T);
  CHECK(rm >= 0.9);
  CHECK(pump_fidelity(traj, s, 8, EdgeKind::RC, T) <= 0.1);
  CHECK(pump_fidelity(traj, s, 8, EdgeKind::LC, 2 * T) <= rm);
  // At t = 0 (J = 0) the left cavity mode lives on a_1, a_3, a_5, a_7 with amplitude ratio
  // close to -z/v; the finite chain shifts it slightly.
  const double r2 = 0.01;
  CHECK(pump_fidelity(traj, s, 8, EdgeKind::LC, 0.0) == Approx((1 - r2) / (1 - std::pow(r2, 4))).epsilon(1e-6));

  const double ans = pump_fidelity(traj, s, 8, EdgeKind::RM, T, FidelityTarget::Ansatz);
  CHECK(ans > 0.5);
  CHECK(ans <= 1.0);
  CHECK_THROWS_AS(pump_fidelity(traj, s, 8, EdgeKind::RM, 3 * T), ConfigError);
  CHECK_THROWS_AS(pump_fidelity(traj, s, 8, EdgeKind::Bulk, T), ConfigError);
}

TEST_CASE("instantaneous spectrum along the intracell pump") {
  const auto s = PumpSchedule::intracell(1.1, 2 * kPi / 100, {0.0, 0.0, 1.0, 0.1});
  const auto slices = instantaneous_spectrum(s, 8, 101);
  REQUIRE(slices.size() == 101);
  CHECK(slices.front().t == 0.0);
  CHECK(slices.back().t == Approx(100.0));
  for (const auto& sl : slices) {
    CHECK(sl.energies.size() == 16);
    CHECK(sl.labels.size() == 16);
    CHECK(sl.band.size() == 16);
  }

  // Follow the in-gap level that starts on the left cavity edge.
  const auto& early = slices[2];
  int lineage = -1;
  for (std::size_t i = 0; i < 16; ++i)
    if (early.labels[i].kind == EdgeKind::LC) lineage = early.band[i];
  REQUIRE(lineage >= 0);
  const auto& late = slices[98];
  EdgeKind end_kind = EdgeKind::Bulk;
  for (std::size_t i = 0; i < 16; ++i)
    if (late.band[i] == lineage) end_kind = late.labels[i].kind;
  CHECK(end_kind == EdgeKind::RM);
  CHECK_THROWS_AS(instantaneous_spectrum(s, 8, 4), ConfigError);
}
