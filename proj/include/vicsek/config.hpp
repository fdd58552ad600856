#pragma once
// Run configuration: flat key=value text, typed validation with aggregated
// error reporting, canonical serialization, and the config digest stamped into
// every output record.

#include <cstdint>
#include <string>
#include <vector>

#include "vicsek/kernel.hpp"
#include "vicsek/state.hpp"
#include "vicsek/stepper.hpp"

namespace vicsek {

enum class Experiment { simulate, couple, homogeneous, analyze, sweep };

std::string experiment_name(Experiment e);

struct RunConfig {
  Experiment experiment = Experiment::simulate;

  // Trajectory-determining fields (all enter config_hash()).
  int d = 2;
  std::size_t n = 64;
  std::size_t m_multiplier = 8;
  KernelKind kernel_kind = KernelKind::gaussian;
  double kappa = 2.0;
  double ell = 1.0;
  StepScheme scheme = StepScheme::stratonovich_project;
  double dt = 1e-3;
  double horizon = 1.0;  // key: t
  std::uint64_t seed = 0;
  std::size_t record_every = 10;
  PositionLaw position{};
  OrientationLaw orientation{};

  // couple
  std::vector<std::size_t> n_grid{16, 32, 64, 128, 256};
  std::size_t replicas = 64;

  // homogeneous
  int k_max = 64;
  double j0 = 0.01;  // initial |J| perturbation

  // analyze
  std::string input;  // trajectory record file

  // sweep
  std::string sweep_parameter;  // kappa | n | seed (empty unless sweeping)
  std::vector<double> sweep_values;
  Experiment sweep_experiment = Experiment::simulate;  // run per grid point

  Kernel kernel() const;
  StepParams step_params() const;

  // Throws ConfigError listing every violation at once.
  void validate() const;

  // Canonical text of the trajectory-determining fields (sorted keys, %.17g
  // floats). Two configs produce identical trajectories iff these match.
  std::string canonical_text() const;

  // FNV-1a 64 over canonical_text(). Experiment-side knobs (grids, replica
  // counts, analysis inputs) deliberately do not enter: the digest identifies
  // the trajectory law, so `analyze` can verify records against the config
  // that produced them.
  std::uint64_t config_hash() const;
};

// Parse the flat key=value format (# comments, blank lines allowed). Unknown
// keys, duplicate keys, and malformed values are all reported together.
// The result is validated before being returned.
RunConfig parse_config_text(const std::string& text);

// Read and parse a config file. Unreadable file -> IoError.
RunConfig load_config(const std::string& path);

// Full echo of a config, every key explicit, parseable by parse_config_text.
std::string serialize_config(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace vicsek
