#pragma once
// The nonlinear (mean-field) process and its synchronous coupling to the
// interacting system.
//
// The law f_t of the nonlinear process is approximated by a self-consistent
// reference ensemble of M >> N particles evolved on its own independent noise;
// N nonlinear copies read their drift from that ensemble (frozen within each
// step) and are driven by the SAME increments and initial data as the N
// interacting particles — that pairing is the definition of the coupling, not
// an optimization.

#include <cstdint>

#include "vicsek/particle_system.hpp"

namespace vicsek {

template <int D>
struct CoupledPair {
  ParticleState<D> interacting;  // N particles, self-interacting
  ParticleState<D> nonlinear;    // N independent copies driven by the ensemble
  ParticleState<D> reference;    // M-particle surrogate for the law f_t
};

template <int D>
struct CoupledWorkspaces {
  Workspace<D> interacting, nonlinear, reference;
};

// Identical (X0, V0) for the interacting and nonlinear halves (a verbatim copy),
// i.i.d. initial data of the same law for the reference ensemble.
template <int D>
CoupledPair<D> make_coupled_pair(std::size_t n, std::size_t m, const PositionLaw& pl,
                                 const OrientationLaw& ol, std::uint64_t seed) {
  if (m < n) throw ConfigError("make_coupled_pair: reference ensemble smaller than N");
  CoupledPair<D> pair;
  pair.interacting = make_initial_state<D>(n, pl, ol, seed, rng::Lane::init_pair);
  pair.nonlinear = pair.interacting;
  pair.reference = make_initial_state<D>(m, pl, ol, seed, rng::Lane::init_reference);
  return pair;
}

// One synchronous step of all three systems, every drift evaluated on pre-step
// states. The nonlinear half advances first (it must read the pre-step
// ensemble) and rides lane `interacting` — shared increments per particle id.
template <int D>
void advance_coupled(CoupledPair<D>& pair, const Kernel& kern, const StepParams& p,
                     std::uint64_t seed, const AdvanceOpts& o, CoupledWorkspaces<D>& ws) {
  advance_system(pair.nonlinear, kern, p, seed, rng::Lane::interacting, o, ws.nonlinear,
                 &pair.reference);
  advance_system(pair.interacting, kern, p, seed, rng::Lane::interacting, o, ws.interacting);
  advance_system(pair.reference, kern, p, seed, rng::Lane::reference, o, ws.reference);
}

// Mean over particles of |X - Xbar|^2 + |V - Vbar|^2 (ambient Euclidean gaps).
template <int D>
double coupling_gap(const ParticleState<D>& a, const ParticleState<D>& b) {
  if (a.n() != b.n()) throw ConfigError("coupling_gap: particle counts differ");
  const std::size_t n = a.n();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < D; ++k) {
      const double dx = a.x[k][i] - b.x[k][i];
      const double dv = a.v[k][i] - b.v[k][i];
      s += dx * dx + dv * dv;
    }
    g[i] = s;
  }
  return n ? pairwise_sum(g) / static_cast<double>(n) : 0.0;
}

}  // namespace vicsek
