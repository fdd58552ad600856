#pragma once
// Experiment drivers behind the CLI subcommands. Each takes a validated
// RunConfig, writes its outputs under `out_dir`, and prints a one-line
// summary to stdout. Errors surface as the library exception types, which
// the CLI maps onto exit codes.

#include <string>

#include "vicsek/config.hpp"

namespace vicsek {

void run_simulate(const RunConfig& cfg, const std::string& out_dir, int workers);
void run_couple(const RunConfig& cfg, const std::string& out_dir, int workers);
void run_homogeneous(const RunConfig& cfg, const std::string& out_dir);
void run_analyze(const RunConfig& cfg, const std::string& out_dir, int workers);
void run_sweep(const RunConfig& cfg, const std::string& out_dir, int workers);

// Dispatch on cfg.experiment.
void run_experiment(const RunConfig& cfg, const std::string& out_dir, int workers);

}  // namespace vicsek
