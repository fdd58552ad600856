#pragma once
// One-step integrators for the sphere-valued velocity diffusion and the
// (trivial) position transport.
//
// Both schemes take the full, already-projected mean-field drift b(v) and a
// standard normal d-vector xi:
//   stratonovich_project:   v' = R( v + P(v) sqrt(2 dt) xi + b dt )
//   ito_correction_renorm:  w  = v + P(v) sqrt(2 dt) xi + b dt - (d-1) v dt,  v' = R(w)
// where R is the retraction w -> w/|w|. The second scheme carries the explicit
// Ito correction -(d-1)v; its pre-normalization defect |w|-1 is reported as a
// diagnostic (O(dt) in absolute size). The exact solution keeps |V|=1; the
// discrete schemes only do so through the retraction.

#include "vicsek/errors.hpp"
#include "vicsek/sphere.hpp"
#include "vicsek/vec.hpp"

namespace vicsek {

enum class StepScheme { stratonovich_project, ito_correction_renorm };

inline const char* scheme_name(StepScheme s) {
  return s == StepScheme::stratonovich_project ? "stratonovich_project" : "ito_correction_renorm";
}

struct StepParams {
  double dt = 1e-3;
  StepScheme scheme = StepScheme::stratonovich_project;

  void validate() const {
    if (!(dt > 0.0) || !(dt <= 0.1))
      throw ConfigError("dt must lie in (0, 0.1]; the retraction degrades for steps "
                        "comparable to the curvature radius");
  }
};

template <int D>
struct VelocityStep {
  Vec<D> v;       // exact unit vector
  double defect;  // |w| - 1 before the retraction
};

template <int D>
inline VelocityStep<D> velocity_step(const Vec<D>& v, const Vec<D>& drift, const Vec<D>& xi,
                                     const StepParams& p) {
  const Vec<D> noise = tangent_project(v, std::sqrt(2.0 * p.dt) * xi);
  Vec<D> w = v + noise + p.dt * drift;
  if (p.scheme == StepScheme::ito_correction_renorm) w -= (static_cast<double>(D) - 1.0) * p.dt * v;
  const double n = norm(w);
  if (!(n > kDegenerateNorm))
    throw NumericalError("velocity_step: degenerate pre-normalization vector; step too large");
  return {(1.0 / n) * w, n - 1.0};
}

template <int D>
constexpr Vec<D> position_step(const Vec<D>& x, const Vec<D>& v, double dt) {
  return x + dt * v;
}

}  // namespace vicsek
