#pragma once
// The interaction kernel K: a bounded, Lipschitz, radial weight on particle
// separations. Three variants: constant, Gaussian, and a C^1 mollified top hat
// with compact support (the only variant eligible for cell-list acceleration,
// because its support radius is exact).

#include <cmath>
#include <string>

#include "vicsek/errors.hpp"
#include "vicsek/vec.hpp"

namespace vicsek {

enum class KernelKind { constant, gaussian, mollified_tophat };

// Smoothstep shoulder of the mollified top hat: 1 on [0, 0.8], 0 on [1, inf),
// cubic in between (C^1, max slope 7.5 at q = 0.9).
inline double tophat_shape(double q) {
  if (q <= 0.8) return 1.0;
  if (q >= 1.0) return 0.0;
  const double t = (q - 0.8) * 5.0;
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

struct Kernel {
  KernelKind kind = KernelKind::constant;
  double kappa = 1.0;  // strength; K(0) = kappa for every variant
  double ell = 1.0;    // length scale; unused by the constant variant

  static Kernel constant(double kappa) { return {KernelKind::constant, kappa, 1.0}; }
  static Kernel gaussian(double kappa, double ell) { return {KernelKind::gaussian, kappa, ell}; }
  static Kernel mollified_tophat(double kappa, double ell) {
    return {KernelKind::mollified_tophat, kappa, ell};
  }

  // K from the squared separation (every variant is radial).
  double eval_r2(double r2) const {
    switch (kind) {
      case KernelKind::constant:
        return kappa;
      case KernelKind::gaussian:
        return kappa * std::exp(-r2 / (2.0 * ell * ell));
      case KernelKind::mollified_tophat:
        return kappa * tophat_shape(std::sqrt(r2) / ell);
    }
    return 0.0;
  }

  template <int D>
  double eval(const Vec<D>& r) const {
    return eval_r2(norm2(r));
  }

  // sup |K|
  double bound() const { return kappa; }

  // Lipschitz constant of K as a map on R^d (max radial slope).
  double lipschitz() const {
    switch (kind) {
      case KernelKind::constant:
        return 0.0;
      case KernelKind::gaussian:
        return kappa * std::exp(-0.5) / ell;  // attained at |r| = ell
      case KernelKind::mollified_tophat:
        return 7.5 * kappa / ell;  // attained at |r| = 0.9 ell
    }
    return 0.0;
  }

  void validate() const {
    if (!(kappa >= 0.0)) throw ConfigError("kernel strength must be nonnegative");
    if (kind != KernelKind::constant && !(ell > 0.0))
      throw ConfigError("kernel length scale must be positive");
  }
};

inline const char* kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::constant:
      return "constant";
    case KernelKind::gaussian:
      return "gaussian";
    case KernelKind::mollified_tophat:
      return "mollified_tophat";
  }
  return "?";
}

}  // namespace vicsek
