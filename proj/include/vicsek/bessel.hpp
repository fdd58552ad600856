#pragma once
// Modified Bessel functions of the first kind, for the von Mises family:
// normalization constants, the mean-resultant-length ratio I1/I0, and ladders
// I_k/I_0 for Fourier coefficients of von Mises densities.

#include <vector>

namespace vicsek {

// I_0(x), plain value. Accurate to ~1e-14 relative for x in [0, ~700).
double bessel_i0(double x);

// e^{-x} I_0(x): overflow-free for any x >= 0 (needed for large KDE concentrations).
double bessel_i0_scaled(double x);

// I_1(x) / I_0(x), the mean resultant length of a von Mises law with concentration x.
double bessel_i1_over_i0(double x);

// {I_k(a)/I_0(a)}_{k=0..kmax} by Miller's downward recurrence.
std::vector<double> bessel_ratio_ladder(double a, int kmax);

// Largest r in [0,1] with r = I1(kappa r)/I0(kappa r); 0 for kappa <= 2.
// (The ratio has slope 1/2 at 0 and is concave, so a positive root exists iff
// kappa/2 > 1; bisection on [tiny, 1].)
double consistency_root(double kappa);

}  // namespace vicsek
