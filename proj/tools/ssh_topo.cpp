#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gssh/errors.hpp"
#include "gssh/experiment.hpp"
#include "gssh/kernels.hpp"
#include "json.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Flag values are parsed into these holders; only flags the user actually passed are
// copied onto the config, so a --config file supplies everything else.
struct Flags {
  std::string config_path;
  gssh::ExperimentConfig v;
  std::string J_range, z_range;
  double omega = 0.0;
  std::vector<std::pair<CLI::Option*, std::function<void(gssh::ExperimentConfig&)>>> setters;

  template <class T>
  void add(CLI::App* app, const std::string& name, T& slot, T gssh::ExperimentConfig::*field,
           const std::string& help) {
    CLI::Option* opt = app->add_option(name, slot, help);
    setters.emplace_back(opt, [&slot, field](gssh::ExperimentConfig& c) { c.*field = slot; });
  }
};

void add_common(CLI::App* app, Flags& f) {
  using C = gssh::ExperimentConfig;
  app->add_option("--config", f.config_path, "JSON config (or a previous .meta.json); flags override it");
  f.add(app, "--J", f.v.J, &C::J, "intracell hopping magnitude");
  f.add(app, "--phi", f.v.phi, &C::phi, "intracell hopping phase (radians, or pi units with --pi-units)");
  f.add(app, "--v", f.v.v, &C::v, "intercell hopping a_{j+1} <-> b_j");
  f.add(app, "--z", f.v.z, &C::z, "intercell hopping b_{j+1} <-> a_j");
  f.add(app, "--N", f.v.N, &C::N, "number of unit cells");
  f.add(app, "--u", f.v.u, &C::u, "uniform cavity detuning");
  f.add(app, "--boundary", f.v.boundary, &C::boundary, "open or periodic");
  f.add(app, "--nk", f.v.nk, &C::nk, "number of k samples");
  f.add(app, "--schedule", f.v.schedule, &C::schedule, "pump schedule: intracell (eq26) or intercell (eq27)");
  f.add(app, "--A", f.v.A, &C::A, "pump amplitude");
  f.add(app, "--omega-frac", f.v.omega_frac, &C::omega_frac, "pump frequency as omega / (2 pi)");
  f.add(app, "--cycles", f.v.cycles, &C::cycles, "pump duration in periods");
  f.add(app, "--dt", f.v.dt, &C::dt, "time step (default: period / 2000)");
  f.add(app, "--init", f.v.init, &C::init, "initial site: a1, b1, aN, bN, a<j>, b<j>");
  f.add(app, "--t-end", f.v.t_end, &C::t_end, "quench duration");
  f.add(app, "--n-times", f.v.n_times, &C::n_times, "number of output times");
  f.add(app, "--record-every", f.v.record_every, &C::record_every, "keep every k-th pump step");
  f.add(app, "--out", f.v.out, &C::out, "output path stem");
  f.add(app, "--format", f.v.format, &C::format, "csv or json");

  CLI::Option* pi = app->add_flag("--pi-units", f.v.pi_units, "phases in units of pi");
  f.setters.emplace_back(pi, [&f](gssh::ExperimentConfig& c) { c.pi_units = f.v.pi_units; });
  CLI::Option* om = app->add_option("--omega", f.omega, "pump angular frequency");
  f.setters.emplace_back(om, [&f](gssh::ExperimentConfig& c) {
    c.omega_frac = f.omega / (2.0 * std::numbers::pi);
  });
  CLI::Option* jr = app->add_option("--J-range", f.J_range, "J sweep as min:max:count");
  f.setters.emplace_back(jr, [&f](gssh::ExperimentConfig& c) { c.J_range = gssh::parse_range(f.J_range, "J_range"); });
  CLI::Option* zr = app->add_option("--z-range", f.z_range, "z sweep as min:max:count");
  f.setters.emplace_back(zr, [&f](gssh::ExperimentConfig& c) { c.z_range = gssh::parse_range(f.z_range, "z_range"); });
  app->get_option("--omega")->excludes(app->get_option("--omega-frac"));
}

gssh::ExperimentConfig assemble(const Flags& f, const std::string& experiment) {
  gssh::ExperimentConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw gssh::ConfigError("cannot read config file '" + f.config_path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw gssh::ConfigError("config file '" + f.config_path + "': " + e.what());
    }
    c = gssh::config_from_json(doc);
  }
  for (const auto& [opt, set] : f.setters)
    if (opt->count() > 0) set(c);
  if (!experiment.empty()) c.experiment = experiment;
  if (c.experiment.empty()) throw gssh::ConfigError("field 'experiment': not given");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized SSH chain: band topology, edge states and pumping"};
  app.set_version_flag("--version", std::string(gssh::kToolName) + " " + gssh::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "do not print written paths");

  Flags flags;
  std::string chosen;
  for (const std::string& name : gssh::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub, flags);
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI::App* run = app.add_subcommand("run", "run the experiment named in --config");
  add_common(run, flags);
  run->callback([&chosen] { chosen = ""; });
  run->get_option("--config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const gssh::ExperimentConfig config = assemble(flags, chosen);
    const gssh::WrittenFiles files = gssh::run_experiment(config);
    if (!quiet)
      std::cout << files.data.string() << "\n" << files.meta.string() << "\n";
    return 0;
  } catch (const gssh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gssh::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
