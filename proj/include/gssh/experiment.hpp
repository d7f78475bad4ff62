#pragma once

// Named experiments behind the ssh-topo command line. Each run validates its
// configuration, computes a table in memory, then writes <out>.csv (or .json)
// together with a <out>.meta.json sidecar that can be fed back as a config.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "gssh/csv.hpp"
#include "json.hpp"

namespace gssh {

inline constexpr const char* kToolName = "ssh-topo";
inline constexpr const char* kToolVersion = "1.0.0";

/// Inclusive sweep range written as "min:max:count" on the command line.
struct Range {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 2;

  double at(std::size_t i) const;
  friend bool operator==(const Range&, const Range&) = default;
};

Range parse_range(const std::string& text, const std::string& field);
std::string to_string(const Range& r);

struct ExperimentConfig {
  std::string experiment;

  // Model, energies in units of v (A for the intercell schedule).
  double J = 1.0;
  double phi = 0.0;
  double v = 1.0;
  double z = 0.8;
  std::size_t N = 8;
  double u = 0.0;
  std::string boundary = "open";
  bool pi_units = false;  // phi inputs and phase outputs in units of pi

  // Momentum space and sweeps.
  std::size_t nk = 512;
  Range J_range{0.0, 3.0, 151};
  Range z_range{0.0, 3.0, 151};

  // Dynamics.
  std::string schedule = "intracell";
  double A = 1.1;
  double omega_frac = 0.01;  // omega / (2 pi)
  double cycles = 1.0;
  double dt = 0.0;           // 0 selects T / 2000
  std::string init = "a1";
  double t_end = 50.0;
  std::size_t n_times = 201;
  std::size_t record_every = 1;

  std::string out = "result";
  std::string format = "csv";
};

const std::vector<std::string>& experiment_names();

/// Reads a config object or a metadata sidecar (its "config" member). Unknown keys and
/// type errors throw ConfigError naming the field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);

/// Throws ConfigError naming the offending field.
void validate_config(const ExperimentConfig& c);

struct ExperimentOutput {
  Table table;
  nlohmann::ordered_json metadata;
};

/// Validates and computes; touches no files.
ExperimentOutput compute_experiment(const ExperimentConfig& c);

struct WrittenFiles {
  std::filesystem::path data;
  std::filesystem::path meta;
};

/// compute_experiment followed by atomic writes of the dataset and its sidecar.
WrittenFiles run_experiment(const ExperimentConfig& c);

}  // namespace gssh
