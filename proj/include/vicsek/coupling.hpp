#pragma once
// Coupling experiment: mean-square pathwise gap between the interacting and
// nonlinear systems across a grid of particle counts, plus the log-log rate
// fit. The measured decay of the gap with N is the headline quantity of the
// library.

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vicsek/detail/parallel.hpp"
#include "vicsek/mckean_vlasov.hpp"

namespace vicsek {

struct CouplingSettings {
  std::vector<std::size_t> n_values{16, 32, 64, 128, 256};
  double horizon = 1.0;
  std::size_t replicas = 64;
  std::size_t m_multiplier = 8;
  Kernel kernel = Kernel::gaussian(2.0, 1.0);
  StepParams step{};
  PositionLaw positions{};
  OrientationLaw orientations{};
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const {
    if (n_values.size() < 4) throw ConfigError("coupling: need at least 4 grid points");
    for (std::size_t n : n_values)
      if (n < 2) throw ConfigError("coupling: every N must be at least 2");
    if (replicas < 8) throw ConfigError("coupling: need at least 8 replicas");
    if (m_multiplier < 8) throw ConfigError("coupling: reference multiplier must be >= 8");
    if (!(horizon >= 0.0)) throw ConfigError("coupling: horizon must be nonnegative");
    step.validate();
    kernel.validate();
    positions.validate();
  }
};

struct CouplingPointResult {
  std::size_t n = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  std::vector<double> replica_errors;
};

struct CouplingResult {
  std::vector<std::size_t> n_values;
  double horizon = 0.0;
  std::size_t replicas = 0;
  std::vector<double> errors;   // per-N mean-square gap at time T
  std::vector<double> stderrs;  // per-N standard error over replicas
  std::uint64_t config_hash = 0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // log of the estimated constant
  double r_squared = 0.0;
};

struct MeasureOpts {
  std::size_t workers = 1;   // replica-level parallelism
  bool keep_finals = false;  // retain final CoupledPair states per replica
  std::size_t trace_every = 0;  // record the gap every k steps (0 = off)
};

template <int D>
struct CouplingMeasurement {
  CouplingPointResult point;
  std::vector<CoupledPair<D>> finals;
  std::vector<double> trace_times;
  std::vector<std::vector<double>> traces;  // [replica][time index]
};

namespace detail {

inline std::uint64_t replica_seed(std::uint64_t base, std::size_t n, std::size_t replica) {
  return rng::mix_seed(base, (static_cast<std::uint64_t>(n) << 32) |
                                 static_cast<std::uint64_t>(replica));
}

}  // namespace detail

// One grid point: `replicas` independent coupled runs to time T, each on a
// seed derived from (base seed, N, replica index). Results land in fixed
// per-replica slots, so the aggregate is bitwise independent of how many
// workers ran the replicas.
template <int D>
CouplingMeasurement<D> measure_coupling_error(std::size_t n, const CouplingSettings& s,
                                              const MeasureOpts& o = {}) {
  if (n < 2) throw ConfigError("measure_coupling_error: N must be at least 2");
  if (s.replicas < 8) throw ConfigError("measure_coupling_error: need at least 8 replicas");
  s.orientations.validate(D);
  const std::size_t m = s.m_multiplier * n;
  const auto steps = static_cast<std::size_t>(std::llround(s.horizon / s.step.dt));

  CouplingMeasurement<D> out;
  out.point.n = n;
  out.point.replica_errors.assign(s.replicas, 0.0);
  if (o.keep_finals) out.finals.resize(s.replicas);
  if (o.trace_every > 0) {
    for (std::size_t k = 0; k <= steps; ++k)
      if (k % o.trace_every == 0 || k == steps)
        out.trace_times.push_back(static_cast<double>(k) * s.step.dt);
    out.traces.assign(s.replicas, std::vector<double>(out.trace_times.size(), 0.0));
  }

  detail::parallel_rows(s.replicas, o.workers, [&](std::size_t r) {
    const std::uint64_t seed = detail::replica_seed(s.seed, n, r);
    try {
      auto pair = make_coupled_pair<D>(n, m, s.positions, s.orientations, seed);
      CoupledWorkspaces<D> ws;
      AdvanceOpts advance_opts;
      advance_opts.workers = 1;  // replicas already occupy the workers
      std::size_t trace_idx = 0;
      auto maybe_trace = [&](std::size_t k) {
        if (o.trace_every == 0) return;
        if (k % o.trace_every == 0 || k == steps)
          out.traces[r][trace_idx++] = coupling_gap(pair.interacting, pair.nonlinear);
      };
      maybe_trace(0);
      for (std::size_t k = 0; k < steps; ++k) {
        advance_coupled(pair, s.kernel, s.step, seed, advance_opts, ws);
        maybe_trace(k + 1);
      }
      out.point.replica_errors[r] = coupling_gap(pair.interacting, pair.nonlinear);
      if (o.keep_finals) out.finals[r] = std::move(pair);
    } catch (const NumericalError& e) {
      throw NumericalError("coupling replica " + std::to_string(r) + " (seed " +
                           std::to_string(seed) + "): " + e.what());
    }
  });

  out.point.mean_error = mean(out.point.replica_errors);
  out.point.std_error = stderr_of_mean(out.point.replica_errors);
  return out;
}

template <int D>
CouplingResult run_coupling_experiment(const CouplingSettings& s) {
  s.validate();
  CouplingResult res;
  res.n_values = s.n_values;
  res.horizon = s.horizon;
  res.replicas = s.replicas;
  MeasureOpts o;
  o.workers = s.workers;
  for (std::size_t n : s.n_values) {
    auto m = measure_coupling_error<D>(n, s, o);
    res.errors.push_back(m.point.mean_error);
    res.stderrs.push_back(m.point.std_error);
  }
  return res;
}

// Ordinary least squares of log(error) on log(N). Degenerate inputs (fewer
// than four distinct N, or a nonpositive error, which happens exactly when the
// coupling is trivial) cannot be fitted and are reported as invalid arguments.
inline RateFit fit_convergence_rate(const std::vector<std::size_t>& n_values,
                                    const std::vector<double>& errors) {
  if (n_values.size() != errors.size())
    throw std::invalid_argument("fit_convergence_rate: size mismatch");
  const std::set<std::size_t> distinct(n_values.begin(), n_values.end());
  if (distinct.size() < 4)
    throw std::invalid_argument("fit_convergence_rate: need at least 4 distinct N values");
  for (double e : errors)
    if (!(e > 0.0))
      throw std::invalid_argument(
          "fit_convergence_rate: nonpositive error value; the log-log fit is undefined "
          "(degenerate run with zero coupling gap?)");

  const std::size_t k = n_values.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    lx[i] = std::log(static_cast<double>(n_values[i]));
    ly[i] = std::log(errors[i]);
  }
  const double mx = mean(lx), my = mean(ly);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double pred = fit.intercept + fit.slope * lx[i];
      ss_res += (ly[i] - pred) * (ly[i] - pred);
    }
    fit.r_squared = 1.0 - ss_res / syy;
  } else {
    fit.r_squared = 1.0;  // constant data, fitted exactly by a flat line
  }
  if (fit.r_squared < 0.0) fit.r_squared = 0.0;
  if (fit.r_squared > 1.0) fit.r_squared = 1.0;
  return fit;
}

inline RateFit fit_convergence_rate(const CouplingResult& r) {
  return fit_convergence_rate(r.n_values, r.errors);
}

// Point clouds for the two-particle chaos comparison: one point per replica,
// (X_0, V_0, X_1, V_1) stacked into R^{4D}, taken from the interacting system
// and from the nonlinear system (whose particles are independent by
// construction). Their sliced-W2 distance shrinks as N grows.
template <int D>
void chaos_pair_samples(const std::vector<CoupledPair<D>>& finals,
                        std::vector<std::vector<double>>& interacting_pts,
                        std::vector<std::vector<double>>& nonlinear_pts) {
  interacting_pts.clear();
  nonlinear_pts.clear();
  for (const auto& f : finals) {
    if (f.interacting.n() < 2) throw ConfigError("chaos_pair_samples: need N >= 2");
    std::vector<double> a, b;
    a.reserve(4 * D);
    b.reserve(4 * D);
    for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
      for (int k = 0; k < D; ++k) a.push_back(f.interacting.x[k][i]);
      for (int k = 0; k < D; ++k) a.push_back(f.interacting.v[k][i]);
      for (int k = 0; k < D; ++k) b.push_back(f.nonlinear.x[k][i]);
      for (int k = 0; k < D; ++k) b.push_back(f.nonlinear.v[k][i]);
    }
    interacting_pts.push_back(std::move(a));
    nonlinear_pts.push_back(std::move(b));
  }
}

}  // namespace vicsek
