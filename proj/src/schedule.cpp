#include "gssh/schedule.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "gssh/errors.hpp"

namespace gssh {

std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Intracell: return "intracell";
    case ScheduleKind::Intercell: return "intercell";
    case ScheduleKind::Custom: return "custom";
  }
  return "custom";
}

ScheduleKind parse_schedule_kind(std::string_view s) {
  std::string low(s);
  for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (low == "eq26" || low == "intracell") return ScheduleKind::Intracell;
  if (low == "eq27" || low == "intercell") return ScheduleKind::Intercell;
  throw ConfigError("schedule must be intracell or intercell, got '" + std::string(s) + "'");
}

PumpSchedule::PumpSchedule(ScheduleKind kind, double amplitude, double omega,
                           CouplingParams baseline, Evaluator evaluator)
    : kind_(kind),
      amplitude_(amplitude),
      omega_(omega),
      baseline_(baseline),
      evaluator_(std::move(evaluator)) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) throw ConfigError("A must be finite and >= 0");
  if (!std::isfinite(omega) || !(omega > 0.0)) throw ConfigError("omega must be positive");
  validate_hoppings(baseline);
}

PumpSchedule PumpSchedule::intracell(double amplitude, double omega,
                                     const CouplingParams& baseline) {
  return PumpSchedule(ScheduleKind::Intracell, amplitude, omega, baseline,
                      [amplitude, omega, baseline](double t) {
                        InstantParams ip{0.0, baseline};
                        ip.u = 0.5 * amplitude * std::sin(omega * t);
                        ip.p.J = amplitude * (1.0 - std::cos(omega * t));
                        return ip;
                      });
}

PumpSchedule PumpSchedule::intercell(double amplitude, double omega,
                                     const CouplingParams& baseline) {
  return PumpSchedule(ScheduleKind::Intercell, amplitude, omega, baseline,
                      [amplitude, omega, baseline](double t) {
                        const double c = std::cos(omega * t);
                        InstantParams ip{0.5 * amplitude * std::sin(omega * t), baseline};
                        ip.p.v = amplitude * (1.0 + c);
                        ip.p.z = amplitude * (1.0 - c);
                        return ip;
                      });
}

PumpSchedule PumpSchedule::custom(double omega, const CouplingParams& baseline,
                                  Evaluator evaluator) {
  if (!evaluator) throw ConfigError("custom schedule needs an evaluator");
  return PumpSchedule(ScheduleKind::Custom, 0.0, omega, baseline, std::move(evaluator));
}

double PumpSchedule::period() const { return 2.0 * std::numbers::pi / omega_; }

InstantParams PumpSchedule::at(double t) const { return evaluator_(t); }

ChainHamiltonian hamiltonian_at(const PumpSchedule& schedule, std::size_t n_cells, double t) {
  const InstantParams ip = schedule.at(t);
  return build_chain(n_cells, Boundary::Open, ip.p, ip.u);
}

}  // namespace gssh
