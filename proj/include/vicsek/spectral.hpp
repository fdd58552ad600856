#pragma once
// Fourier spectral solver for the space-homogeneous alignment dynamics on the
// circle (d=2 only):
//
//   df/dt = d²f/dθ² + d/dθ ( f · u_θ ),   u_θ(θ) = κ (J_x sinθ − J_y cosθ),
//
// where J = ∫ ω f(ω) dω is the mean orientation. In Fourier variables
// f(θ) = Σ_k c_k e^{ikθ} this is the mode system
//
//   ċ_m = −m² c_m − i m ( g₁ c_{m−1} + conj(g₁) c_{m+1} ),
//   g₁ = κ (i J_x + J_y) / 2,   J = 2π (Re c₁, −Im c₁),
//
// integrated with an integrating-factor RK4 (exact e^{−m²t} treatment of the
// stiff diffusion). Von Mises densities f ∝ exp(a cos(θ−θ₀)) with a = κ|J|
// solving the self-consistency relation are exact stationary points of the
// mode system (Bessel recurrence I_{m−1} − I_{m+1} = (2m/a) I_m), which is the
// test that gates the sign conventions above.

#include <complex>
#include <cstddef>
#include <vector>

#include "vicsek/errors.hpp"

namespace vicsek {

struct FourierDensity {
  int k_max = 64;
  std::vector<std::complex<double>> modes;  // c_k at index k + k_max
  double time = 0.0;

  std::complex<double>& at(int k) { return modes[static_cast<std::size_t>(k + k_max)]; }
  const std::complex<double>& at(int k) const {
    return modes[static_cast<std::size_t>(k + k_max)];
  }
};

struct OrderParameter {
  double jx = 0.0, jy = 0.0;
  double norm() const;
};

// c_0 = 1/(2π), everything else zero.
FourierDensity uniform_density(int k_max);

// Uniform density with the first harmonic nudged so that |J(0)| = eps along
// the x-axis.
FourierDensity perturbed_uniform(int k_max, double eps);

// Von Mises density f(θ) ∝ exp(a cos(θ − θ0)) as Fourier modes:
// c_k = I_k(a) e^{−ikθ0} / (2π I_0(a)).
FourierDensity von_mises_density(double a, double theta0, int k_max);

// Full right-hand side (diffusion + alignment) of the mode system.
std::vector<std::complex<double>> circle_rhs(const FourierDensity& f, double kappa);

OrderParameter polar_order_spectral(const FourierDensity& f);

// f(θ_j) on the uniform grid θ_j = 2πj/n, j = 0..n−1 (real part; the
// imaginary part is roundoff for a symmetric mode vector).
std::vector<double> density_on_grid(const FourierDensity& f, std::size_t n);

// Largest root r ∈ [0,1] of r = I₁(κr)/I₀(κr); 0 at or below the critical
// coupling κ_c = 2. Declared in bessel.hpp as well; re-exported here because
// it is the fixed-point oracle for the supercritical solver runs.
double consistency_root(double kappa);

class SpectralSolver {
 public:
  // dt must be in (0, 1e−2]: the integrating factor removes the diffusion
  // stiffness but the alignment term is still integrated explicitly.
  SpectralSolver(FourierDensity init, double kappa, double dt);

  void step();  // one IFRK4 step; enforces mass/symmetry, checks gates
  const FourierDensity& density() const { return f_; }
  double kappa() const { return kappa_; }
  double dt() const { return dt_; }
  std::size_t steps_taken() const { return steps_; }

 private:
  void enforce_invariants();
  void check_gates();

  FourierDensity f_;
  double kappa_, dt_;
  std::size_t steps_ = 0;
  std::vector<double> e_full_, e_half_;  // e^{−m²h}, e^{−m²h/2}
  std::vector<std::complex<double>> k1_, k2_, k3_, k4_;
};

// Evolve `init` to time T (T/dt rounded to the nearest whole step count).
FourierDensity integrate_spectral(FourierDensity init, double kappa, double T, double dt);

}  // namespace vicsek
