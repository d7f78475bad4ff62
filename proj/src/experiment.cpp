#include "gssh/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "gssh/dynamics.hpp"
#include "gssh/edge_state.hpp"
#include "gssh/errors.hpp"
#include "gssh/kernels.hpp"
#include "gssh/lattice.hpp"
#include "gssh/model.hpp"
#include "gssh/schedule.hpp"

namespace gssh {

namespace {

using ojson = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) field_error(field, what);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct InitSite {
  Sublattice sub;
  std::size_t cell;
};

InitSite parse_init(const std::string& s, std::size_t n) {
  if (s.size() < 2 || (s[0] != 'a' && s[0] != 'b'))
    field_error("init", "expected a<cell> or b<cell> (e.g. a1, bN), got '" + s + "'");
  const Sublattice sub = s[0] == 'a' ? Sublattice::Cavity : Sublattice::Mechanical;
  const std::string rest = s.substr(1);
  if (rest == "N") return {sub, n};
  std::size_t cell = 0;
  for (char c : rest) {
    if (c < '0' || c > '9') field_error("init", "bad cell index in '" + s + "'");
    cell = cell * 10 + static_cast<std::size_t>(c - '0');
  }
  if (cell < 1 || cell > n) field_error("init", "cell index out of range 1.." + std::to_string(n));
  return {sub, cell};
}

double phase_in(const ExperimentConfig& c) { return c.pi_units ? c.phi * kPi : c.phi; }

CouplingParams model_params(const ExperimentConfig& c) { return {c.J, phase_in(c), c.v, c.z}; }

Boundary boundary_of(const ExperimentConfig& c) {
  return c.boundary == "periodic" ? Boundary::Periodic : Boundary::Open;
}

PumpSchedule schedule_of(const ExperimentConfig& c) {
  const double omega = 2.0 * kPi * c.omega_frac;
  const CouplingParams base = model_params(c);
  return parse_schedule_kind(c.schedule) == ScheduleKind::Intracell
             ? PumpSchedule::intracell(c.A, omega, base)
             : PumpSchedule::intercell(c.A, omega, base);
}

std::vector<std::string> site_columns(std::size_t n) {
  std::vector<std::string> cols;
  for (std::size_t i = 1; i <= 2 * n; ++i) cols.push_back("P_" + std::to_string(i));
  return cols;
}

ojson winding_json(const WindingResult& w) {
  return {{"value", w.value}, {"well_defined", w.well_defined},
          {"boundary_distance", w.boundary_distance}};
}

const char* figure_for(const ExperimentConfig& c) {
  const std::string& e = c.experiment;
  const bool intracell = parse_schedule_kind(c.schedule) == ScheduleKind::Intracell;
  if (e == "dispersion") return "bulk bands E(k) with the d-vector ellipse";
  if (e == "dvector") return "d-vector trajectory over the Brillouin zone";
  if (e == "phase-diagram") return "winding-number phase diagram in the (J, z) plane";
  if (e == "winding") return "single-point winding number";
  if (e == "critical-phase") return "critical phase at which the gap closes";
  if (e == "spectrum-sweep") return "open-chain spectrum versus J with zero-mode crossings";
  if (e == "edge-states") return "open-chain eigenstate profiles and edge labels";
  if (e == "quench") return "site probabilities after injecting a single site";
  if (e == "pump")
    return intracell ? "probability flow under the intracell pump" : "probability flow under the intercell pump";
  return intracell ? "instantaneous spectrum along the intracell pump"
                   : "instantaneous spectrum along the intercell pump";
}

ExperimentOutput run_dispersion(const ExperimentConfig& c, bool d_only) {
  const CouplingParams p = model_params(c);
  ExperimentOutput out;
  out.table.columns = d_only ? std::vector<std::string>{"k", "d_x", "d_y", "d_z"}
                             : std::vector<std::string>{"k", "E_minus", "E_plus", "d_x", "d_y"};
  for (const BlochSample& s : sample_brillouin_zone(p, c.nk)) {
    if (d_only)
      out.table.add_row({s.k, s.d[0], s.d[1], s.d[2]});
    else
      out.table.add_row({s.k, s.energy_minus, s.energy_plus, s.d[0], s.d[1]});
  }
  out.metadata["results"] = {{"winding_analytic", winding_json(winding_analytic(p))},
                             {"band_gap", band_gap(p, std::max<std::size_t>(c.nk, 64))},
                             {"ellipse_center", {p.J * std::cos(p.phi), p.J * std::sin(p.phi)}},
                             {"ellipse_semi_axes", {p.v + p.z, std::abs(p.z - p.v)}}};
  return out;
}

ExperimentOutput run_phase_diagram(const ExperimentConfig& c) {
  ExperimentOutput out;
  out.table.columns = {"J", "z", "W", "W_analytic", "well_defined", "boundary_distance"};
  const KGrid grid(c.nk);
  std::size_t counts[3] = {0, 0, 0};
  std::size_t undefined = 0;
  for (std::size_t iz = 0; iz < c.z_range.count; ++iz) {
    for (std::size_t iJ = 0; iJ < c.J_range.count; ++iJ) {
      CouplingParams p = model_params(c);
      p.J = c.J_range.at(iJ);
      p.z = c.z_range.at(iz);
      const WindingResult a = winding_analytic(p);
      try {
        const WindingResult w = winding_numeric(p, grid);
        out.table.add_row({p.J, p.z, static_cast<long long>(w.value), static_cast<long long>(a.value),
                           static_cast<long long>(w.well_defined), w.boundary_distance});
        if (w.well_defined) ++counts[w.value + 1];
        else ++undefined;
      } catch (const GaplessModel&) {
        out.table.add_row({p.J, p.z, std::string(), static_cast<long long>(a.value), 0LL,
                           a.boundary_distance});
        ++undefined;
      }
    }
  }
  out.metadata["results"] = {{"points_W_minus1", counts[0]},
                             {"points_W_0", counts[1]},
                             {"points_W_plus1", counts[2]},
                             {"points_undefined", undefined}};
  return out;
}

ExperimentOutput run_winding(const ExperimentConfig& c) {
  const CouplingParams p = model_params(c);
  const WindingResult w = winding_numeric(p, c.nk);
  const WindingResult a = winding_analytic(p);
  ExperimentOutput out;
  out.table.columns = {"J", "phi", "v", "z", "W", "W_analytic", "well_defined", "boundary_distance"};
  out.table.add_row({p.J, c.phi, p.v, p.z, static_cast<long long>(w.value),
                     static_cast<long long>(a.value), static_cast<long long>(w.well_defined),
                     w.boundary_distance});
  out.metadata["results"] = {{"numeric", winding_json(w)}, {"analytic", winding_json(a)}};
  return out;
}

ExperimentOutput run_critical_phase(const ExperimentConfig& c) {
  const std::vector<double> phases = critical_phase(model_params(c));
  ExperimentOutput out;
  out.table.columns = {"branch", "phi_c_rad", "phi_c_over_pi"};
  ojson rad = ojson::array(), pis = ojson::array();
  for (std::size_t i = 0; i < phases.size(); ++i) {
    out.table.add_row({static_cast<long long>(i), phases[i], phases[i] / kPi});
    rad.push_back(phases[i]);
    pis.push_back(phases[i] / kPi);
  }
  double smallest = phases.front();
  for (double x : phases)
    if (std::abs(x) < std::abs(smallest)) smallest = x;
  out.metadata["results"] = {{"phi_c_rad", rad},
                             {"phi_c_over_pi", pis},
                             {"smallest_abs_phi_c_rad", std::abs(smallest)},
                             {"smallest_abs_phi_c_over_pi", std::abs(smallest) / kPi}};
  return out;
}

ExperimentOutput run_spectrum_sweep(const ExperimentConfig& c) {
  const SpectrumSweep sweep =
      spectrum_sweep(c.N, model_params(c), c.J_range.min, c.J_range.max, c.J_range.count, c.u);
  ExperimentOutput out;
  out.table.columns = {"J"};
  for (std::size_t i = 1; i <= 2 * c.N; ++i) out.table.columns.push_back("E_" + std::to_string(i));
  out.table.columns.push_back("signed_mid_gap");
  for (const SweepRow& r : sweep.rows) {
    std::vector<Cell> row{r.J};
    for (Eigen::Index i = 0; i < r.energies.size(); ++i) row.emplace_back(r.energies(i));
    row.emplace_back(r.signed_mid_gap);
    out.table.add_row(std::move(row));
  }
  ojson res;
  if (c.u == 0.0) res["zero_mode_crossings"] = find_zero_mode_crossings(sweep);
  out.metadata["results"] = res;
  return out;
}

ExperimentOutput run_edge_states(const ExperimentConfig& c) {
  const ChainHamiltonian h = build_chain(c.N, boundary_of(c), model_params(c), c.u);
  const EigenSystem es = eigensystem(h);
  ExperimentOutput out;
  out.table.columns = {"level", "energy", "kind", "xi", "fit_quality", "cavity_weight"};
  for (const auto& s : site_columns(c.N)) out.table.columns.push_back(s);
  ojson kinds = ojson::array();
  for (Eigen::Index i = 0; i < es.energies.size(); ++i) {
    const Eigen::VectorXcd psi = es.states.col(i);
    const EdgeStateLabel label = classify_edge_state(psi);
    std::vector<Cell> row{static_cast<long long>(i), es.energies(i), std::string(to_string(label.kind)),
                          label.xi ? Cell(*label.xi) : Cell(std::string()), label.fit_quality,
                          label.cavity_weight};
    for (Eigen::Index k = 0; k < psi.size(); ++k) row.emplace_back(std::norm(psi(k)));
    out.table.add_row(std::move(row));
    kinds.push_back(std::string(to_string(label.kind)));
  }
  out.metadata["results"] = {{"labels", kinds}, {"spectral_norm", es.norm}};
  return out;
}

ExperimentOutput run_quench(const ExperimentConfig& c) {
  const ChainHamiltonian h = build_chain(c.N, boundary_of(c), model_params(c), c.u);
  const EigenSystem es = eigensystem(h);
  const InitSite init = parse_init(c.init, c.N);
  const StateVector psi0 = site_state(c.N, init.sub, init.cell);
  ExperimentOutput out;
  out.table.columns = {"t"};
  for (const auto& s : site_columns(c.N)) out.table.columns.push_back(s);
  double drift = 0.0;
  for (std::size_t i = 0; i < c.n_times; ++i) {
    const double t = c.t_end * static_cast<double>(i) / static_cast<double>(c.n_times - 1);
    const StateVector psi = evolve_constant(es, psi0, t);
    drift = std::max(drift, std::abs(psi.amplitudes.squaredNorm() - 1.0));
    std::vector<Cell> row{t};
    for (Eigen::Index k = 0; k < psi.amplitudes.size(); ++k) row.emplace_back(std::norm(psi.amplitudes(k)));
    out.table.add_row(std::move(row));
  }
  out.metadata["results"] = {{"norm_drift", drift}};
  return out;
}

ExperimentOutput run_pump(const ExperimentConfig& c) {
  const PumpSchedule schedule = schedule_of(c);
  const double period = schedule.period();
  const double duration = c.cycles * period;
  const double dt = c.dt > 0.0 ? c.dt : period / 2000.0;
  const InitSite init = parse_init(c.init, c.N);
  const StateVector psi0 = site_state(c.N, init.sub, init.cell);
  EvolveOptions opts;
  opts.record_every = c.record_every;
  const Trajectory traj = evolve_schedule(schedule, c.N, psi0, duration, dt, opts);

  ExperimentOutput out;
  out.table.columns = {"t", "omega_t"};
  for (const auto& s : site_columns(c.N)) out.table.columns.push_back(s);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<Cell> row{traj.times[i], schedule.omega() * traj.times[i]};
    for (Eigen::Index k = 0; k < traj.probabilities[i].size(); ++k)
      row.emplace_back(traj.probabilities[i](k));
    out.table.add_row(std::move(row));
  }

  ojson fidelities = ojson::array();
  const auto half_cycles = static_cast<std::size_t>(std::floor(2.0 * c.cycles + 1e-9));
  for (std::size_t h = 1; h <= half_cycles; ++h) {
    const double t = 0.5 * period * static_cast<double>(h);
    ojson entry{{"t", t}, {"cycles", 0.5 * static_cast<double>(h)}};
    for (EdgeKind k : {EdgeKind::LC, EdgeKind::LM, EdgeKind::RC, EdgeKind::RM})
      entry[std::string(to_string(k))] = pump_fidelity(traj, schedule, c.N, k, t);
    fidelities.push_back(entry);
  }
  out.metadata["results"] = {{"period", period},
                             {"dt", traj.dt},
                             {"norm_drift", traj.norm_drift},
                             {"halving_delta", traj.halving_delta},
                             {"edge_fidelities", fidelities}};
  return out;
}

ExperimentOutput run_instantaneous(const ExperimentConfig& c) {
  const PumpSchedule schedule = schedule_of(c);
  const auto slices = instantaneous_spectrum(schedule, c.N, c.n_times);
  ExperimentOutput out;
  out.table.columns = {"t", "omega_t", "level", "energy", "band", "broken", "kind", "xi"};
  std::size_t broken = 0;
  for (const SpectrumSlice& s : slices) {
    for (Eigen::Index i = 0; i < s.energies.size(); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const EdgeStateLabel& l = s.labels[ui];
      out.table.add_row({s.t, schedule.omega() * s.t, static_cast<long long>(i), s.energies(i),
                         static_cast<long long>(s.band[ui]), static_cast<long long>(s.broken[ui]),
                         std::string(to_string(l.kind)), l.xi ? Cell(*l.xi) : Cell(std::string())});
      broken += s.broken[ui] ? 1 : 0;
    }
  }
  out.metadata["results"] = {{"period", schedule.period()}, {"broken_links", broken}};
  return out;
}

}  // namespace

double Range::at(std::size_t i) const {
  if (count < 2) return min;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

Range parse_range(const std::string& text, const std::string& field) {
  Range r;
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos) field_error(field, "expected min:max:count, got '" + text + "'");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, first), b = text.substr(first + 1, second - first - 1),
                      n = text.substr(second + 1);
    r.min = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    r.max = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    const long long cnt = std::stoll(n, &used);
    if (used != n.size() || cnt < 0) throw std::invalid_argument(n);
    r.count = static_cast<std::size_t>(cnt);
  } catch (const std::logic_error&) {
    field_error(field, "expected min:max:count, got '" + text + "'");
  }
  return r;
}

std::string to_string(const Range& r) {
  return fmt17(r.min) + ":" + fmt17(r.max) + ":" + std::to_string(r.count);
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "dispersion", "dvector",     "phase-diagram", "winding", "critical-phase", "spectrum-sweep",
      "edge-states", "quench",     "pump",          "instantaneous-spectrum"};
  return names;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  const nlohmann::json& j = (doc.is_object() && doc.contains("config")) ? doc.at("config") : doc;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;

  auto get_number = [&](const std::string& key, double& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) field_error(key, "must be a number");
    dst = j.at(key).get<double>();
  };
  auto get_count = [&](const std::string& key, std::size_t& dst) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) field_error(key, "must be a non-negative integer");
    dst = v.get<std::size_t>();
  };
  auto get_string = [&](const std::string& key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) field_error(key, "must be a string");
    dst = j.at(key).get<std::string>();
  };
  auto get_range = [&](const std::string& key, Range& dst) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_string()) {
      dst = parse_range(v.get<std::string>(), key);
    } else if (v.is_object() && v.contains("min") && v.contains("max") && v.contains("count") &&
               v.at("min").is_number() && v.at("max").is_number() && v.at("count").is_number_integer()) {
      dst = {v.at("min").get<double>(), v.at("max").get<double>(), v.at("count").get<std::size_t>()};
    } else {
      field_error(key, "must be \"min:max:count\" or {min, max, count}");
    }
  };

  static const std::set<std::string> known{
      "experiment", "J",  "phi",    "v",     "z",     "N",    "u",      "boundary",   "pi_units",
      "nk",         "J_range", "z_range", "schedule", "A", "omega_frac", "omega", "cycles", "dt",
      "init",       "t_end",  "n_times", "record_every", "out", "format"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) field_error(key, "unknown field");

  get_string("experiment", c.experiment);
  get_number("J", c.J);
  get_number("phi", c.phi);
  get_number("v", c.v);
  get_number("z", c.z);
  get_count("N", c.N);
  get_number("u", c.u);
  get_string("boundary", c.boundary);
  if (j.contains("pi_units")) {
    if (!j.at("pi_units").is_boolean()) field_error("pi_units", "must be true or false");
    c.pi_units = j.at("pi_units").get<bool>();
  }
  get_count("nk", c.nk);
  get_range("J_range", c.J_range);
  get_range("z_range", c.z_range);
  get_string("schedule", c.schedule);
  get_number("A", c.A);
  get_number("omega_frac", c.omega_frac);
  if (j.contains("omega")) {
    double omega = 0.0;
    get_number("omega", omega);
    c.omega_frac = omega / (2.0 * kPi);
  }
  get_number("cycles", c.cycles);
  get_number("dt", c.dt);
  get_string("init", c.init);
  get_number("t_end", c.t_end);
  get_count("n_times", c.n_times);
  get_count("record_every", c.record_every);
  get_string("out", c.out);
  get_string("format", c.format);
  return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  return {{"experiment", c.experiment}, {"J", c.J},
          {"phi", c.phi},               {"v", c.v},
          {"z", c.z},                   {"N", c.N},
          {"u", c.u},                   {"boundary", c.boundary},
          {"pi_units", c.pi_units},     {"nk", c.nk},
          {"J_range", to_string(c.J_range)}, {"z_range", to_string(c.z_range)},
          {"schedule", c.schedule},     {"A", c.A},
          {"omega_frac", c.omega_frac}, {"cycles", c.cycles},
          {"dt", c.dt},                 {"init", c.init},
          {"t_end", c.t_end},           {"n_times", c.n_times},
          {"record_every", c.record_every}, {"out", c.out},
          {"format", c.format}};
}

void validate_config(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  require(std::find(names.begin(), names.end(), c.experiment) != names.end(), "experiment",
          "unknown experiment '" + c.experiment + "'");
  auto finite = [](double x) { return std::isfinite(x); };
  require(finite(c.J) && c.J >= 0.0, "J", "must be finite and >= 0");
  require(finite(c.phi), "phi", "must be finite");
  require(finite(c.v) && c.v > 0.0, "v", "must be finite and > 0");
  require(finite(c.z) && c.z >= 0.0, "z", "must be finite and >= 0");
  require(finite(c.u), "u", "must be finite");
  require(c.N >= 1 && c.N <= kMaxCells, "N", "must be in [1, " + std::to_string(kMaxCells) + "]");
  require(c.boundary == "open" || c.boundary == "periodic", "boundary", "must be open or periodic");
  require(c.nk >= 16, "nk", "must be at least 16");
  for (const auto& [name, r] : {std::pair{"J_range", c.J_range}, std::pair{"z_range", c.z_range}}) {
    require(finite(r.min) && finite(r.max) && r.min >= 0.0 && r.max >= r.min, name,
            "needs 0 <= min <= max");
    require(r.count >= 2, name, "count must be at least 2");
  }
  try {
    (void)parse_schedule_kind(c.schedule);
  } catch (const ConfigError& e) {
    field_error("schedule", e.what());
  }
  require(finite(c.A) && c.A > 0.0, "A", "must be finite and > 0");
  require(finite(c.omega_frac) && c.omega_frac > 0.0, "omega_frac", "must be finite and > 0");
  require(finite(c.cycles) && c.cycles > 0.0, "cycles", "must be finite and > 0");
  require(finite(c.dt) && c.dt >= 0.0, "dt", "must be finite and >= 0 (0 selects T/2000)");
  (void)parse_init(c.init, c.N);
  require(finite(c.t_end) && c.t_end > 0.0, "t_end", "must be finite and > 0");
  require(c.n_times >= (c.experiment == "instantaneous-spectrum" ? 8u : 2u), "n_times",
          c.experiment == "instantaneous-spectrum" ? "must be at least 8" : "must be at least 2");
  require(c.record_every >= 1, "record_every", "must be at least 1");
  require(!c.out.empty(), "out", "must not be empty");
  require(c.format == "csv" || c.format == "json", "format", "must be csv or json");
}

ExperimentOutput compute_experiment(const ExperimentConfig& c) {
  validate_config(c);
  ExperimentOutput out;
  const std::string& e = c.experiment;
  if (e == "dispersion") out = run_dispersion(c, false);
  else if (e == "dvector") out = run_dispersion(c, true);
  else if (e == "phase-diagram") out = run_phase_diagram(c);
  else if (e == "winding") out = run_winding(c);
  else if (e == "critical-phase") out = run_critical_phase(c);
  else if (e == "spectrum-sweep") out = run_spectrum_sweep(c);
  else if (e == "edge-states") out = run_edge_states(c);
  else if (e == "quench") out = run_quench(c);
  else if (e == "pump") out = run_pump(c);
  else out = run_instantaneous(c);

  const bool amplitude_units = (e == "pump" || e == "instantaneous-spectrum") &&
                               parse_schedule_kind(c.schedule) == ScheduleKind::Intercell;
  ojson meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["experiment"] = e;
  meta["figure"] = figure_for(c);
  meta["energy_unit"] = amplitude_units ? "A" : "v";
  meta["phase_units"] = c.pi_units ? "pi" : "rad";
  meta["basis"] = "interleaved (a_1, b_1, ..., a_N, b_N); P_i with odd i on cavity sites";
  meta["columns"] = out.table.columns;
  meta["config"] = config_to_json(c);
  meta["results"] = out.metadata.contains("results") ? out.metadata["results"] : ojson::object();
  out.metadata = std::move(meta);
  return out;
}

WrittenFiles run_experiment(const ExperimentConfig& c) {
  const ExperimentOutput out = compute_experiment(c);
  WrittenFiles files;
  files.data = c.out + (c.format == "json" ? ".json" : ".csv");
  files.meta = c.out + ".meta.json";
  write_file_atomic(files.data, c.format == "json" ? to_json_text(out.table) : to_csv(out.table));
  write_file_atomic(files.meta, out.metadata.dump(2) + "\n");
  return files;
}

}  // namespace gssh
