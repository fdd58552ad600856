#pragma once
// Particle state in structure-of-arrays layout (one contiguous array per
// component), which is what the vectorized drift rows consume. `sid[i]` is the
// noise-stream id of slot i: identity in normal runs, permuted only by the
// exchangeability tests, so that "particle" remains a label, not a position in
// memory.

#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "vicsek/errors.hpp"
#include "vicsek/rng.hpp"
#include "vicsek/sphere.hpp"
#include "vicsek/vec.hpp"

namespace vicsek {

template <int D>
struct ParticleState {
  std::array<std::vector<double>, D> x;  // positions, component-major
  std::array<std::vector<double>, D> v;  // unit velocities, component-major
  std::vector<std::uint64_t> sid;        // noise stream id per slot
  std::uint64_t step = 0;
  double time = 0.0;

  std::size_t n() const { return sid.size(); }

  void resize(std::size_t n_) {
    for (int k = 0; k < D; ++k) {
      x[k].assign(n_, 0.0);
      v[k].assign(n_, 0.0);
    }
    sid.resize(n_);
    std::iota(sid.begin(), sid.end(), std::uint64_t{0});
  }

  Vec<D> pos(std::size_t i) const {
    Vec<D> r;
    for (int k = 0; k < D; ++k) r[k] = x[k][i];
    return r;
  }
  Vec<D> vel(std::size_t i) const {
    Vec<D> r;
    for (int k = 0; k < D; ++k) r[k] = v[k][i];
    return r;
  }
  void set_pos(std::size_t i, const Vec<D>& p) {
    for (int k = 0; k < D; ++k) x[k][i] = p[k];
  }
  void set_vel(std::size_t i, const Vec<D>& u) {
    for (int k = 0; k < D; ++k) v[k][i] = u[k];
  }
};

template <int D>
bool bitwise_equal(const ParticleState<D>& a, const ParticleState<D>& b) {
  if (a.n() != b.n() || a.step != b.step) return false;
  for (int k = 0; k < D; ++k)
    if (a.x[k] != b.x[k] || a.v[k] != b.v[k]) return false;
  return true;
}

// Index of the first particle with a non-finite coordinate, or -1.
template <int D>
std::ptrdiff_t first_nonfinite(const ParticleState<D>& s) {
  const std::size_t n = s.n();
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < D; ++k)
      if (!std::isfinite(s.x[k][i]) || !std::isfinite(s.v[k][i]))
        return static_cast<std::ptrdiff_t>(i);
  return -1;
}

// Max deviation of any velocity norm from 1.
template <int D>
double max_norm_deviation(const ParticleState<D>& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double dev = std::abs(norm(s.vel(i)) - 1.0);
    if (dev > worst) worst = dev;
  }
  return worst;
}

struct PositionLaw {
  double mean = 0.0;  // per component
  double sd = 1.0;

  void validate() const {
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean))
      throw ConfigError("position law requires finite mean and positive sd");
  }
};

struct OrientationLaw {
  enum class Kind { uniform, vmf } kind = Kind::uniform;
  std::array<double, 3> mu = {1.0, 0.0, 0.0};  // first D components used
  double kappa = 0.0;

  void validate(int d) const {
    if (kind == Kind::vmf) {
      if (!(kappa >= 0.0)) throw ConfigError("orientation vmf concentration must be >= 0");
      double n2 = 0.0;
      for (int k = 0; k < d; ++k) n2 += mu[static_cast<std::size_t>(k)] * mu[static_cast<std::size_t>(k)];
      if (!(n2 > 0.0)) throw ConfigError("orientation vmf mean direction must be nonzero");
    }
  }

  template <int D>
  Vec<D> mean_direction() const {
    Vec<D> m;
    for (int k = 0; k < D; ++k) m[k] = mu[static_cast<std::size_t>(k)];
    return normalize_to_sphere(m);
  }
};

// i.i.d. initial data: Gaussian positions (finite second moment) and uniform or
// von Mises-Fisher orientations. Draws live on the given init lane; positions
// use step 0 of a particle's stream and orientations step 1, so the two never
// collide whatever the rejection samplers consume.
template <int D>
ParticleState<D> make_initial_state(std::size_t n, const PositionLaw& pl, const OrientationLaw& ol,
                                    std::uint64_t seed, rng::Lane lane) {
  ParticleState<D> s;
  s.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec<D> p;
    const auto [g0, g1] = rng::normal_pair(seed, lane, i, /*step=*/0, /*slot=*/0);
    p[0] = pl.mean + pl.sd * g0;
    p[1] = pl.mean + pl.sd * g1;
    if constexpr (D == 3) p[2] = pl.mean + pl.sd * rng::normal_pair(seed, lane, i, 0, 1).first;
    s.set_pos(i, p);

    const Vec<D> w = (ol.kind == OrientationLaw::Kind::uniform)
                         ? sample_uniform_sphere<D>(seed, lane, i, /*step=*/1)
                         : sample_von_mises_fisher<D>(ol.mean_direction<D>(), ol.kappa, seed, lane,
                                                      i, /*step=*/1);
    s.set_vel(i, w);
  }
  return s;
}

}  // namespace vicsek
