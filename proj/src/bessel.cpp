#include "vicsek/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace vicsek {

namespace {

constexpr double kSeriesCut = 15.0;

// Power series around 0; converges fast for x <= kSeriesCut.
double i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * m);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double i1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x, sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * (m + 1.0));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// e^{-x} I_nu(x) by the large-argument expansion; sums c_{k+1} = c_k ((2k+1)^2 - 4 nu^2)/(8x(k+1)).
double i_scaled_asymptotic(double x, int nu) {
  const double fournu2 = 4.0 * nu * nu;
  double c = 1.0, sum = 1.0;
  for (int k = 0; k < 30; ++k) {
    const double odd = 2.0 * k + 1.0;
    c *= (odd * odd - fournu2) / (8.0 * x * (k + 1.0));
    sum += c;
    if (std::abs(c) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * 3.14159265358979323846 * x);
}

}  // namespace

double bessel_i0(double x) {
  x = std::abs(x);
  if (x <= kSeriesCut) return i0_series(x);
  return i_scaled_asymptotic(x, 0) * std::exp(x);
}

double bessel_i0_scaled(double x) {
  x = std::abs(x);
  if (x <= kSeriesCut) return i0_series(x) * std::exp(-x);
  return i_scaled_asymptotic(x, 0);
}

double bessel_i1_over_i0(double x) {
  if (x == 0.0) return 0.0;
  if (x <= kSeriesCut) return i1_series(x) / i0_series(x);
  return i_scaled_asymptotic(x, 1) / i_scaled_asymptotic(x, 0);
}

std::vector<double> bessel_ratio_ladder(double a, int kmax) {
  if (kmax < 0) throw std::invalid_argument("bessel_ratio_ladder: kmax < 0");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  out[0] = 1.0;
  if (a == 0.0 || kmax == 0) return out;

  // Miller: run I_{k-1} = I_{k+1} + (2k/a) I_k downward from a seed well above kmax;
  // the recurrence grows fast, so rescale everything already stored when needed.
  const int start = kmax + 40 + static_cast<int>(a);
  std::vector<double> raw(static_cast<std::size_t>(kmax) + 1, 0.0);
  double fkp1 = 0.0, fk = 1e-280;
  for (int k = start; k >= 1; --k) {
    const double fkm1 = fkp1 + (2.0 * k / a) * fk;
    fkp1 = fk;
    fk = fkm1;
    if (k - 1 <= kmax) raw[static_cast<std::size_t>(k - 1)] = fk;
    if (std::abs(fk) > 1e250) {
      const double scale = 1e-250;
      fk *= scale;
      fkp1 *= scale;
      for (double& v : raw) v *= scale;
    }
  }
  const double f0 = raw[0];
  for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = raw[static_cast<std::size_t>(k)] / f0;
  return out;
}

double consistency_root(double kappa) {
  if (kappa <= 2.0) return 0.0;
  double lo = 1e-8, hi = 1.0;
  // g(r) = ratio(kappa r) - r: positive near 0 (slope kappa/2 - 1 > 0), negative at 1
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = bessel_i1_over_i0(kappa * mid) - mid;
    (g > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace vicsek
