#pragma once
// Pairwise (cascade) summation. Used for every aggregate that feeds an acceptance
// threshold: the result depends only on the array contents, not on how many workers
// produced them, so reductions stay reproducible across worker counts.

#include <cmath>
#include <cstddef>
#include <vector>

namespace vicsek {

inline double pairwise_sum(const double* a, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(a, h) + pairwise_sum(a + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& a) { return pairwise_sum(a.data(), a.size()); }

inline double mean(const std::vector<double>& a) {
  return a.empty() ? 0.0 : pairwise_sum(a) / static_cast<double>(a.size());
}

// Standard error of the mean (unbiased variance / n, square-rooted).
inline double stderr_of_mean(const std::vector<double>& a) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  const double m = mean(a);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - m;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace vicsek
