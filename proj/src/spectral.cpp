#include "vicsek/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "vicsek/bessel.hpp"

namespace vicsek {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMassTol = 1e-14;
constexpr double kCutoffTol = 1e-10;

void validate_density(const FourierDensity& f) {
  if (f.k_max < 1) throw ConfigError("spectral: k_max must be at least 1");
  if (f.modes.size() != static_cast<std::size_t>(2 * f.k_max + 1))
    throw ConfigError("spectral: mode vector size does not match k_max");
}

}  // namespace

double OrderParameter::norm() const { return std::hypot(jx, jy); }

FourierDensity uniform_density(int k_max) {
  FourierDensity f;
  f.k_max = k_max;
  f.modes.assign(static_cast<std::size_t>(2 * k_max + 1), {0.0, 0.0});
  validate_density(f);
  f.at(0) = 1.0 / kTwoPi;
  return f;
}

FourierDensity perturbed_uniform(int k_max, double eps) {
  if (!(eps >= 0.0 && eps <= 0.5))
    throw ConfigError("perturbation size must lie in [0, 0.5]: f = (1 + 2 eps cos)/2pi stays "
                      "nonnegative only there");
  FourierDensity f = uniform_density(k_max);
  const double c1 = eps / kTwoPi;  // J_x = 2π Re c_1 = eps
  f.at(1) = c1;
  f.at(-1) = c1;
  return f;
}

FourierDensity von_mises_density(double a, double theta0, int k_max) {
  FourierDensity f = uniform_density(k_max);
  const std::vector<double> ratio = bessel_ratio_ladder(a, k_max);
  for (int k = 1; k <= k_max; ++k) {
    const std::complex<double> phase{std::cos(k * theta0), -std::sin(k * theta0)};
    const std::complex<double> ck = ratio[static_cast<std::size_t>(k)] / kTwoPi * phase;
    f.at(k) = ck;
    f.at(-k) = std::conj(ck);
  }
  return f;
}

OrderParameter polar_order_spectral(const FourierDensity& f) {
  validate_density(f);
  const std::complex<double> c1 = f.at(1);
  return {kTwoPi * c1.real(), -kTwoPi * c1.imag()};
}

std::vector<double> density_on_grid(const FourierDensity& f, std::size_t n) {
  validate_density(f);
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    // Real form: c_0 + 2 Σ_{k>0} Re(c_k e^{ikθ}).
    double val = f.at(0).real();
    for (int k = 1; k <= f.k_max; ++k) {
      const std::complex<double> ck = f.at(k);
      val += 2.0 * (ck.real() * std::cos(k * theta) - ck.imag() * std::sin(k * theta));
    }
    out[j] = val;
  }
  return out;
}

namespace {

// Nonlinear (alignment) part only; the −m² diffusion is handled by the
// integrating factor.
void alignment_rhs(const FourierDensity& f, double kappa,
                   std::vector<std::complex<double>>& out) {
  const int K = f.k_max;
  out.assign(f.modes.size(), {0.0, 0.0});
  const OrderParameter J = polar_order_spectral(f);
  const std::complex<double> g1{0.5 * kappa * J.jy, 0.5 * kappa * J.jx};
  const std::complex<double> g1c = std::conj(g1);
  for (int m = -K; m <= K; ++m) {
    const std::complex<double> lo = (m - 1 >= -K) ? f.at(m - 1) : std::complex<double>{};
    const std::complex<double> hi = (m + 1 <= K) ? f.at(m + 1) : std::complex<double>{};
    const std::complex<double> conv = g1 * lo + g1c * hi;
    // −i m conv
    out[static_cast<std::size_t>(m + K)] =
        std::complex<double>{static_cast<double>(m) * conv.imag(),
                             -static_cast<double>(m) * conv.real()};
  }
}

}  // namespace

std::vector<std::complex<double>> circle_rhs(const FourierDensity& f, double kappa) {
  validate_density(f);
  std::vector<std::complex<double>> out;
  alignment_rhs(f, kappa, out);
  const int K = f.k_max;
  for (int m = -K; m <= K; ++m)
    out[static_cast<std::size_t>(m + K)] -=
        static_cast<double>(m) * static_cast<double>(m) * f.at(m);
  return out;
}

SpectralSolver::SpectralSolver(FourierDensity init, double kappa, double dt)
    : f_(std::move(init)), kappa_(kappa), dt_(dt) {
  validate_density(f_);
  if (!(kappa_ >= 0.0)) throw ConfigError("spectral: kappa must be nonnegative");
  if (!(dt_ > 0.0) || !(dt_ <= 1e-2))
    throw ConfigError("spectral: dt must lie in (0, 1e-2]");
  const int K = f_.k_max;
  e_full_.resize(f_.modes.size());
  e_half_.resize(f_.modes.size());
  for (int m = -K; m <= K; ++m) {
    const double m2 = static_cast<double>(m) * static_cast<double>(m);
    e_full_[static_cast<std::size_t>(m + K)] = std::exp(-m2 * dt_);
    e_half_[static_cast<std::size_t>(m + K)] = std::exp(-m2 * dt_ * 0.5);
  }
  enforce_invariants();
  check_gates();
}

void SpectralSolver::step() {
  const std::size_t n = f_.modes.size();
  const double h = dt_;
  alignment_rhs(f_, kappa_, k1_);

  FourierDensity stage = f_;
  for (std::size_t i = 0; i < n; ++i)
    stage.modes[i] = e_half_[i] * (f_.modes[i] + 0.5 * h * k1_[i]);
  alignment_rhs(stage, kappa_, k2_);

  for (std::size_t i = 0; i < n; ++i)
    stage.modes[i] = e_half_[i] * f_.modes[i] + 0.5 * h * k2_[i];
  alignment_rhs(stage, kappa_, k3_);

  for (std::size_t i = 0; i < n; ++i)
    stage.modes[i] = e_full_[i] * f_.modes[i] + h * e_half_[i] * k3_[i];
  alignment_rhs(stage, kappa_, k4_);

  for (std::size_t i = 0; i < n; ++i)
    f_.modes[i] = e_full_[i] * f_.modes[i] +
                  (h / 6.0) * (e_full_[i] * k1_[i] +
                               2.0 * e_half_[i] * (k2_[i] + k3_[i]) + k4_[i]);
  ++steps_;
  f_.time += h;
  enforce_invariants();
  check_gates();
}

void SpectralSolver::enforce_invariants() {
  const int K = f_.k_max;
  // The m=0 derivative is identically zero, so any drift here is a bug, not
  // roundoff accumulation.
  if (std::abs(f_.at(0).real() - 1.0 / kTwoPi) > kMassTol ||
      std::abs(f_.at(0).imag()) > kMassTol)
    throw NumericalError("spectral mass drift at step " + std::to_string(steps_));
  f_.at(0) = 1.0 / kTwoPi;  // keep it bit-exact anyway
  for (int k = 1; k <= K; ++k) {
    const std::complex<double> sym = 0.5 * (f_.at(k) + std::conj(f_.at(-k)));
    f_.at(k) = sym;
    f_.at(-k) = std::conj(sym);
  }
}

void SpectralSolver::check_gates() {
  for (const auto& c : f_.modes)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericalError("spectral blow-up: non-finite mode at step " +
                           std::to_string(steps_));
  const double edge =
      std::max(std::abs(f_.at(f_.k_max)), std::abs(f_.at(-f_.k_max)));
  if (edge > kCutoffTol) {
    char mag[32];
    std::snprintf(mag, sizeof mag, "%.3e", edge);
    throw NumericalError("spectral cutoff inadequate at step " + std::to_string(steps_) +
                         ": |c_K| = " + mag + " with K_max = " + std::to_string(f_.k_max) +
                         " (increase k_max)");
  }
}

FourierDensity integrate_spectral(FourierDensity init, double kappa, double T, double dt) {
  if (!(T >= 0.0)) throw ConfigError("spectral: horizon must be nonnegative");
  SpectralSolver solver(std::move(init), kappa, dt);
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  for (std::size_t k = 0; k < steps; ++k) solver.step();
  return solver.density();
}

}  // namespace vicsek
