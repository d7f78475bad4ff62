#pragma once

#include <functional>
#include <string_view>

#include "gssh/lattice.hpp"

namespace gssh {

/// Hamiltonian parameters at one instant: cavity detuning plus hoppings.
struct InstantParams {
  double u = 0.0;
  CouplingParams p;
};

enum class ScheduleKind {
  Intracell,  // u = (A/2) sin wt, J = A (1 - cos wt); v, z held at the baseline
  Intercell,  // u = (A/2) sin wt, v = A (1 + cos wt), z = A (1 - cos wt); J held
  Custom,
};

std::string_view to_string(ScheduleKind k);
/// Accepts "intracell" (alias "eq26") and "intercell" (alias "eq27"). Throws ConfigError.
ScheduleKind parse_schedule_kind(std::string_view s);

class PumpSchedule {
 public:
  using Evaluator = std::function<InstantParams(double)>;

  static PumpSchedule intracell(double amplitude, double omega, const CouplingParams& baseline);
  static PumpSchedule intercell(double amplitude, double omega, const CouplingParams& baseline);
  /// `evaluator` must be periodic with period 2 pi / omega.
  static PumpSchedule custom(double omega, const CouplingParams& baseline, Evaluator evaluator);

  ScheduleKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double omega() const { return omega_; }
  double period() const;
  const CouplingParams& baseline() const { return baseline_; }

  InstantParams at(double t) const;

 private:
  PumpSchedule(ScheduleKind kind, double amplitude, double omega, CouplingParams baseline,
               Evaluator evaluator);

  ScheduleKind kind_;
  double amplitude_;
  double omega_;
  CouplingParams baseline_;
  Evaluator evaluator_;
};

ChainHamiltonian hamiltonian_at(const PumpSchedule& schedule, std::size_t n_cells, double t);

}  // namespace gssh
