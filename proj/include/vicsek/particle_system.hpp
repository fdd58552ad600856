#pragma once
// Time stepping of the interacting N-particle system: Jacobi-style simultaneous
// update (all drifts from the pre-step state), then one velocity and position
// step per particle with increments drawn from the particle's own counter-based
// stream. Everything is a pure function of (initial state, kernel, params,
// seed), bit-identical for any worker count.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vicsek/detail/parallel.hpp"
#include "vicsek/drift.hpp"
#include "vicsek/errors.hpp"
#include "vicsek/kernel.hpp"
#include "vicsek/rng.hpp"
#include "vicsek/state.hpp"
#include "vicsek/stepper.hpp"
#include "vicsek/summation.hpp"

namespace vicsek {

struct AdvanceOpts {
  int workers = 1;
  DriftPath path = DriftPath::automatic;
  bool zero_noise = false;  // test hook: forces xi = 0
};

template <int D>
struct Workspace {
  std::array<std::vector<double>, D> drift;
  std::vector<double> abs_defect;
};

struct StepDiag {
  double max_abs_defect = 0.0;   // max |w|-1 before retraction
  double mean_abs_defect = 0.0;  // mean of the absolute defect
};

// One step. `target` selects the list the drift is summed over (nullptr: the
// system itself). `lane` selects the noise stream family; a coupled run passes
// `interacting` for the nonlinear half as well, which is what ties the two
// systems to the same Brownian increments.
template <int D>
StepDiag advance_system(ParticleState<D>& s, const Kernel& kern, const StepParams& p,
                        std::uint64_t seed, rng::Lane lane, const AdvanceOpts& o,
                        Workspace<D>& ws, const ParticleState<D>* target = nullptr) {
  const std::size_t n = s.n();
  const ParticleState<D>& tgt = target ? *target : s;
  mean_field_drifts(s, tgt, kern, o.path, o.workers, ws.drift);
  ws.abs_defect.resize(n);

  detail::parallel_rows(n, o.workers, [&](std::size_t i) {
    const Vec<D> v = s.vel(i);
    Vec<D> xi{};
    if (!o.zero_noise) xi = rng::gaussian_increment<D>(seed, lane, s.sid[i], s.step);
    Vec<D> dr;
    for (int k = 0; k < D; ++k) dr[k] = ws.drift[k][i];
    const VelocityStep<D> vs = velocity_step(v, dr, xi, p);
    s.set_pos(i, position_step(s.pos(i), v, p.dt));  // transport with the pre-step velocity
    s.set_vel(i, vs.v);
    ws.abs_defect[i] = std::abs(vs.defect);
  });

  s.step += 1;
  s.time += p.dt;

  const std::ptrdiff_t bad = first_nonfinite(s);
  if (bad >= 0)
    throw NumericalError("advance_system: non-finite state at particle " + std::to_string(bad) +
                         " after step " + std::to_string(s.step));

  StepDiag d;
  if (n > 0) {
    d.mean_abs_defect = pairwise_sum(ws.abs_defect) / static_cast<double>(n);
    for (const double a : ws.abs_defect) d.max_abs_defect = std::max(d.max_abs_defect, a);
  }
  return d;
}

// Run to time T = steps * dt, steps = round(T/dt), invoking `record` at every
// step index that is a multiple of record_every (step 0 included).
template <int D>
void run_simulation(ParticleState<D>& s, const Kernel& kern, const StepParams& p, double T,
                    std::uint64_t seed, rng::Lane lane, const AdvanceOpts& o,
                    std::uint64_t record_every,
                    const std::function<void(const ParticleState<D>&)>& record) {
  if (T < 0.0) throw ConfigError("run_simulation: negative horizon");
  if (record_every < 1) throw ConfigError("run_simulation: record_every must be >= 1");
  const std::uint64_t steps = static_cast<std::uint64_t>(std::llround(T / p.dt));
  Workspace<D> ws;
  for (std::uint64_t k = 0;; ++k) {
    if (record && k % record_every == 0) record(s);
    if (k == steps) break;
    advance_system(s, kern, p, seed, lane, o, ws);
  }
}

}  // namespace vicsek
