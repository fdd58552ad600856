#include "vicsek/observables.hpp"

#include <algorithm>
#include <cmath>

#include "vicsek/bessel.hpp"
#include "vicsek/detail/fastexp.hpp"
#include "vicsek/rng.hpp"

namespace vicsek {

std::string TestFunction::name() const {
  switch (id) {
    case Id::const_one: return "const_one";
    case Id::coord_x: return "coord_x_" + std::to_string(component);
    case Id::coord_v: return "coord_v_" + std::to_string(component);
    case Id::quadratic_x: return "quadratic_x";
    case Id::x_dot_v: return "x_dot_v";
    case Id::gaussian_bump_x: return "gaussian_bump_x";
  }
  return "unknown";
}

std::size_t WeakFormReport::points_within_band() const {
  std::size_t c = 0;
  for (std::size_t j = 0; j < residual.size(); ++j)
    if (std::abs(residual[j]) <= band[j]) ++c;
  return c;
}

double WeakFormReport::fraction_within_band() const {
  return residual.empty() ? 1.0
                          : static_cast<double>(points_within_band()) /
                                static_cast<double>(residual.size());
}

double WeakFormReport::max_abs_residual() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return m;
}

double wasserstein2_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("wasserstein2_1d: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t na = a.size(), nb = b.size();
  // Integrate |Fa^{-1}(q) - Fb^{-1}(q)|^2 over q in (0,1); the quantile
  // functions are step functions with breakpoints i/na and j/nb.
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  double q = 0.0;
  while (i < na && j < nb) {
    const double qa = static_cast<double>(i + 1) / static_cast<double>(na);
    const double qb = static_cast<double>(j + 1) / static_cast<double>(nb);
    const double qn = std::min(qa, qb);
    const double d = a[i] - b[j];
    acc += (qn - q) * d * d;
    q = qn;
    if (qa <= qn) ++i;
    if (qb <= qn) ++j;
  }
  return std::sqrt(acc);
}

double sliced_w2(const std::vector<std::vector<double>>& a,
                 const std::vector<std::vector<double>>& b, std::size_t n_directions,
                 std::uint64_t seed) {
  if (a.empty() || b.empty()) throw ConfigError("sliced_w2: empty sample");
  if (n_directions == 0) throw ConfigError("sliced_w2: need at least one direction");
  const std::size_t m = a.front().size();
  if (m == 0) throw ConfigError("sliced_w2: zero-dimensional points");
  for (const auto& p : a)
    if (p.size() != m) throw ConfigError("sliced_w2: ragged sample a");
  for (const auto& p : b)
    if (p.size() != m) throw ConfigError("sliced_w2: ragged sample b");

  std::vector<double> dir(m), pa(a.size()), pb(b.size()), w2s;
  w2s.reserve(n_directions);
  for (std::size_t d = 0; d < n_directions; ++d) {
    // Gaussian direction, normalized; redraw in the (measure-zero, but cheap
    // to guard) degenerate case.
    double n2 = 0.0;
    std::uint64_t attempt = 0;
    do {
      for (std::size_t k = 0; k < m; k += 2) {
        const auto [z0, z1] =
            rng::normal_pair(seed, rng::Lane::analysis, d, attempt, static_cast<std::uint32_t>(k / 2));
        dir[k] = z0;
        if (k + 1 < m) dir[k + 1] = z1;
      }
      n2 = 0.0;
      for (double c : dir) n2 += c * c;
      ++attempt;
    } while (!(n2 > 1e-24) && attempt < 100);
    if (!(n2 > 1e-24)) throw NumericalError("sliced_w2: degenerate direction draw");
    const double inv = 1.0 / std::sqrt(n2);
    for (double& c : dir) c *= inv;

    for (std::size_t i = 0; i < a.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += dir[k] * a[i][k];
      pa[i] = s;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += dir[k] * b[i][k];
      pb[i] = s;
    }
    w2s.push_back(wasserstein2_1d(pa, pb));
  }
  return mean(w2s);
}

double default_kde_bandwidth(std::size_t n) {
  if (n == 0) throw ConfigError("default_kde_bandwidth: empty sample");
  return 0.5 * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> kde_circle(const std::vector<double>& angles, double bandwidth,
                               std::size_t grid_n) {
  if (angles.empty()) throw ConfigError("kde_circle: empty sample");
  if (!(bandwidth > 0.0)) throw ConfigError("kde_circle: bandwidth must be positive");
  if (grid_n < 8) throw ConfigError("kde_circle: grid too coarse");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double conc = 1.0 / (bandwidth * bandwidth);
  const double norm = 1.0 / (kTwoPi * bessel_i0_scaled(conc));

  std::vector<double> out(grid_n, 0.0);
  std::vector<double> terms(angles.size());
  for (std::size_t j = 0; j < grid_n; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(grid_n);
    for (std::size_t s = 0; s < angles.size(); ++s) {
      // e^{conc*cos(u)} / (2*pi*I0(conc)) in overflow-free scaled form.
      const double u = theta - angles[s];
      terms[s] = detail::exp_neg(conc * (1.0 - std::cos(u))) * norm;
    }
    out[j] = mean(terms);
  }
  // Periodic trapezoid = uniform weights 2*pi/grid_n.
  const double mass = pairwise_sum(out) * kTwoPi / static_cast<double>(grid_n);
  if (!(mass > 0.0)) throw NumericalError("kde_circle: vanishing mass");
  for (double& f : out) f /= mass;
  return out;
}

double l1_distance_on_grid(const std::vector<double>& f, const std::vector<double>& g) {
  if (f.size() != g.size() || f.empty())
    throw ConfigError("l1_distance_on_grid: size mismatch");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::vector<double> d(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) d[j] = std::abs(f[j] - g[j]);
  return mean(d) * kTwoPi;
}

}  // namespace vicsek
