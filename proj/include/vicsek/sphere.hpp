#pragma once
// Geometry of the unit sphere S^{d-1} in R^d: tangent projection, retraction,
// and samplers for the supported orientation laws.

#include <cmath>
#include <cstdint>
#include <string>

#include "vicsek/errors.hpp"
#include "vicsek/rng.hpp"
#include "vicsek/vec.hpp"

namespace vicsek {

inline constexpr double kAlgebraTol = 1e-12;   // algebraic identities
inline constexpr double kStateTol = 1e-6;      // state-validity gates
inline constexpr double kDegenerateNorm = 1e-8;

// P(v) y = y - (v.y) v, the projection onto the tangent space at v.
// Rejects v that has drifted off the sphere: that always means the caller's
// state is corrupt, not that a smaller tolerance is wanted.
template <int D>
inline Vec<D> tangent_project(const Vec<D>& v, const Vec<D>& y) {
  const double n2 = norm2(v);
  if (!(std::abs(n2 - 1.0) < 2.0 * kStateTol))  // |v|^2-1 ~ 2(|v|-1) near 1
    throw NumericalError("tangent_project: direction has norm " + std::to_string(std::sqrt(n2)) +
                         ", expected 1");
  return y - dot(v, y) * v;
}

template <int D>
inline Vec<D> normalize_to_sphere(const Vec<D>& w) {
  const double n = norm(w);
  if (!(n > kDegenerateNorm))
    throw NumericalError("normalize_to_sphere: degenerate vector (norm " + std::to_string(n) +
                         "); step size too large");
  return (1.0 / n) * w;
}

// Uniform law on S^{d-1}: normalized Gaussian vector, resampling the (practically
// impossible) degenerate draw. `step` selects the draw; attempts use the slot axis.
template <int D>
inline Vec<D> sample_uniform_sphere(std::uint64_t seed, rng::Lane lane, std::uint64_t id,
                                    std::uint64_t step) {
  for (std::uint32_t attempt = 0; attempt < 100; ++attempt) {
    Vec<D> g;
    const auto [a, b] = rng::normal_pair(seed, lane, id, step, 2 * attempt);
    g[0] = a;
    g[1] = b;
    if constexpr (D == 3) g[2] = rng::normal_pair(seed, lane, id, step, 2 * attempt + 1).first;
    const double n = norm(g);
    if (n > kDegenerateNorm) return (1.0 / n) * g;
  }
  throw NumericalError("sample_uniform_sphere: 100 degenerate draws in a row");
}

namespace detail {

// Rotate the reference direction (1,0) to mu and apply the in-plane angle psi.
inline Vec<2> from_angle_about(const Vec<2>& mu, double cos_psi, double sin_psi) {
  return {mu[0] * cos_psi - mu[1] * sin_psi, mu[1] * cos_psi + mu[0] * sin_psi};
}

}  // namespace detail

// Von Mises–Fisher law with density proportional to exp(kappa mu.omega).
//
// d=2: Best–Fisher rejection with a wrapped-Cauchy envelope. The envelope
// parameter rho is evaluated in the cancellation-free form
//   rho = 2 kappa tau / ((1+s)(tau + sqrt(2 tau))),  s = sqrt(1+4k^2), tau = 1+s,
// so it stays accurate for small kappa; below 1e-3 plain rejection against the
// uniform proposal is cheaper and exact.
//
// d=3: exact inversion of the cosine marginal,
//   W = 1 + log1p((1-u) expm1(-2 kappa)) / kappa,
// plus a uniform azimuth in an orthonormal frame around mu.
template <int D>
Vec<D> sample_von_mises_fisher(const Vec<D>& mu, double kappa, std::uint64_t seed, rng::Lane lane,
                               std::uint64_t id, std::uint64_t step);

template <>
inline Vec<2> sample_von_mises_fisher<2>(const Vec<2>& mu, double kappa, std::uint64_t seed,
                                         rng::Lane lane, std::uint64_t id, std::uint64_t step) {
  if (kappa < 0.0) throw ConfigError("von Mises-Fisher concentration must be nonnegative");
  if (kappa < 1e-12) return sample_uniform_sphere<2>(seed, lane, id, step);
  constexpr double pi = 3.14159265358979323846264338328;
  if (kappa < 1e-3) {
    // acceptance probability exp(kappa(cos t - 1)) >= exp(-2 kappa) ~ 1
    for (std::uint32_t attempt = 0; attempt < 100; ++attempt) {
      const auto [u1, u2] = rng::unit_pair(seed, lane, id, step, 2 * attempt);
      const double t = 2.0 * pi * u1 - pi;
      if (std::log(u2) <= kappa * (std::cos(t) - 1.0))
        return detail::from_angle_about(mu, std::cos(t), std::sin(t));
    }
    throw NumericalError("sample_von_mises_fisher: rejection failed 100 times (kappa ~ 0)");
  }
  const double s = std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double tau = 1.0 + s;
  const double rho = 2.0 * kappa * tau / ((1.0 + s) * (tau + std::sqrt(2.0 * tau)));
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (std::uint32_t attempt = 0; attempt < 1000; ++attempt) {
    const auto [u1, u2] = rng::unit_pair(seed, lane, id, step, 2 * attempt);
    const double u3 = rng::unit_pair(seed, lane, id, step, 2 * attempt + 1).first;
    const double z = std::cos(pi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double cos_psi = f;
      const double sin_abs = std::sqrt(std::max(0.0, 1.0 - f * f));
      const double sin_psi = (u3 < 0.5) ? -sin_abs : sin_abs;
      return detail::from_angle_about(mu, cos_psi, sin_psi);
    }
  }
  throw NumericalError("sample_von_mises_fisher: rejection failed 1000 times");
}

template <>
inline Vec<3> sample_von_mises_fisher<3>(const Vec<3>& mu, double kappa, std::uint64_t seed,
                                         rng::Lane lane, std::uint64_t id, std::uint64_t step) {
  if (kappa < 0.0) throw ConfigError("von Mises-Fisher concentration must be nonnegative");
  if (kappa < 1e-12) return sample_uniform_sphere<3>(seed, lane, id, step);
  constexpr double pi = 3.14159265358979323846264338328;
  const auto [u1, u2] = rng::unit_pair(seed, lane, id, step, 0);
  const double w = (kappa < 1e-8) ? 2.0 * u1 - 1.0
                                  : 1.0 + std::log1p((1.0 - u1) * std::expm1(-2.0 * kappa)) / kappa;
  // orthonormal frame (e1, e2) perpendicular to mu, from the least-aligned axis
  int a = 0;
  if (std::abs(mu[1]) < std::abs(mu[a])) a = 1;
  if (std::abs(mu[2]) < std::abs(mu[a])) a = 2;
  Vec<3> axis{};
  axis[a] = 1.0;
  Vec<3> e1 = axis - dot(axis, mu) * mu;
  e1 = (1.0 / norm(e1)) * e1;
  const Vec<3> e2{mu[1] * e1[2] - mu[2] * e1[1], mu[2] * e1[0] - mu[0] * e1[2],
                  mu[0] * e1[1] - mu[1] * e1[0]};
  const double phi = 2.0 * pi * u2;
  const double rw = std::sqrt(std::max(0.0, 1.0 - w * w));
  return w * mu + (rw * std::cos(phi)) * e1 + (rw * std::sin(phi)) * e2;
}

}  // namespace vicsek
