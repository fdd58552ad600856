#pragma once
// Observables over particle states: polar order, smooth test functions with
// hand-coded sphere derivatives, empirical weak-form residuals of the kinetic
// equation, sliced Wasserstein-2 distances, and circular kernel density
// estimates.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vicsek/drift.hpp"
#include "vicsek/state.hpp"
#include "vicsek/summation.hpp"

namespace vicsek {

// ---------------------------------------------------------------------------
// Polar order
// ---------------------------------------------------------------------------

// J = (1/N) sum_i V_i; |J| <= 1 since each V_i is unit.
template <int D>
Vec<D> polar_order_particles(const ParticleState<D>& s) {
  if (s.n() == 0) throw ConfigError("polar_order_particles: empty state");
  Vec<D> j;
  for (int k = 0; k < D; ++k) j[k] = mean(s.v[k]);
  return j;
}

// ---------------------------------------------------------------------------
// Test functions on R^d x S^{d-1}
// ---------------------------------------------------------------------------

// Smooth maps Phi(x, omega) with closed-form x-gradient, tangential
// omega-gradient, and Laplace–Beltrami value. Velocity arguments are
// normalized internally, i.e. every function is the 0-homogeneous extension
// evaluated on the sphere — values and derivatives cannot depend on |v|.
struct TestFunction {
  enum class Id { const_one, coord_x, coord_v, quadratic_x, x_dot_v, gaussian_bump_x };

  Id id = Id::const_one;
  int component = 0;                        // coord_x / coord_v
  std::array<double, 3> center{0, 0, 0};    // gaussian_bump_x (first D entries)
  double width = 1.0;                       // gaussian_bump_x

  static TestFunction one() { return {}; }
  static TestFunction coord_x(int k) { return {Id::coord_x, k, {0, 0, 0}, 1.0}; }
  static TestFunction coord_v(int k) { return {Id::coord_v, k, {0, 0, 0}, 1.0}; }
  static TestFunction quadratic_x() { return {Id::quadratic_x, 0, {0, 0, 0}, 1.0}; }
  static TestFunction x_dot_v() { return {Id::x_dot_v, 0, {0, 0, 0}, 1.0}; }
  static TestFunction gaussian_bump(const std::array<double, 3>& c, double w) {
    if (!(w > 0.0)) throw ConfigError("gaussian_bump: width must be positive");
    return {Id::gaussian_bump_x, 0, c, w};
  }

  std::string name() const;

  template <int D>
  double value(const Vec<D>& x, const Vec<D>& v) const {
    const Vec<D> w = normalize_to_sphere(v);
    switch (id) {
      case Id::const_one: return 1.0;
      case Id::coord_x: return x[component];
      case Id::coord_v: return w[component];
      case Id::quadratic_x: return norm2(x);
      case Id::x_dot_v: return dot(x, w);
      case Id::gaussian_bump_x: {
        double q = 0.0;
        for (int k = 0; k < D; ++k) {
          const double d = x[k] - center[static_cast<std::size_t>(k)];
          q += d * d;
        }
        return std::exp(-q / (2.0 * width * width));
      }
    }
    return 0.0;
  }

  template <int D>
  Vec<D> grad_x(const Vec<D>& x, const Vec<D>& v) const {
    Vec<D> g{};
    switch (id) {
      case Id::const_one:
      case Id::coord_v:
        break;
      case Id::coord_x:
        g[component] = 1.0;
        break;
      case Id::quadratic_x:
        g = 2.0 * x;
        break;
      case Id::x_dot_v:
        g = normalize_to_sphere(v);
        break;
      case Id::gaussian_bump_x: {
        const double val = value<D>(x, v);
        for (int k = 0; k < D; ++k)
          g[k] = -(x[k] - center[static_cast<std::size_t>(k)]) / (width * width) * val;
        break;
      }
    }
    return g;
  }

  // Tangential gradient at omega = v/|v| (always orthogonal to omega).
  template <int D>
  Vec<D> grad_omega(const Vec<D>& x, const Vec<D>& v) const {
    const Vec<D> w = normalize_to_sphere(v);
    Vec<D> g{};
    switch (id) {
      case Id::const_one:
      case Id::coord_x:
      case Id::quadratic_x:
      case Id::gaussian_bump_x:
        break;
      case Id::coord_v: {
        Vec<D> e{};
        e[component] = 1.0;
        g = e - w[component] * w;
        break;
      }
      case Id::x_dot_v:
        g = x - dot(x, w) * w;
        break;
    }
    return g;
  }

  // Laplace–Beltrami on S^{D-1}; ambient coordinates restricted to the sphere
  // are eigenfunctions with eigenvalue -(D-1).
  template <int D>
  double lap_omega(const Vec<D>& x, const Vec<D>& v) const {
    const Vec<D> w = normalize_to_sphere(v);
    switch (id) {
      case Id::const_one:
      case Id::coord_x:
      case Id::quadratic_x:
      case Id::gaussian_bump_x:
        return 0.0;
      case Id::coord_v:
        return -(D - 1.0) * w[component];
      case Id::x_dot_v:
        return -(D - 1.0) * dot(x, w);
    }
    return 0.0;
  }
};

// Generator applied to Phi at one particle. `drift` is the projected
// alignment drift -P(v)(H*F)(x) exactly as the dynamics computes it, so the
// three terms are transport, spherical diffusion, and alignment:
//   L Phi = v·grad_x Phi + lap_omega Phi + grad_omega Phi · drift.
template <int D>
double generator_value(const TestFunction& phi, const Vec<D>& x, const Vec<D>& v,
                       const Vec<D>& drift) {
  return dot(v, phi.grad_x<D>(x, v)) + phi.lap_omega<D>(x, v) +
         dot(phi.grad_omega<D>(x, v), drift);
}

// ---------------------------------------------------------------------------
// Weak-form residual
// ---------------------------------------------------------------------------

// Calibrated once on zero-coupling runs at the experiment scales (N=256, 32
// replicas, dt=1e-3, snapshots every 10 steps), where <omega_k> decays as
// e^{-(d-1)t} exactly. The centered velocity averages put most of the residual
// noise outside the rhs, so a two-standard-error band alone leaves per-point
// coverage near the 95% line; this constant tops the band up to a ~3-sigma
// envelope at those scales while also absorbing the O(dt) weak bias. It keeps
// the band far below the shift a sign or factor error in the drift produces
// (~0.5 at the same scales), so the residual check stays diagnostic.
inline constexpr double kWeakFormBandConstant = 80.0;

// Band width = 2*(replica standard error) + band_constant*dt: the first term
// covers Monte Carlo scatter, the second the time-discretization bias.
struct WeakFormOpts {
  double dt = 1e-3;  // integrator step of the run that produced the snapshots
  double band_constant = kWeakFormBandConstant;
  DriftPath path = DriftPath::automatic;
  int workers = 1;
};

struct WeakFormReport {
  std::vector<double> times;     // interior snapshot times
  std::vector<double> lhs;       // centered d/dt of <Phi>
  std::vector<double> rhs;       // <L Phi>
  std::vector<double> residual;  // lhs - rhs
  std::vector<double> band;      // acceptance band per time point

  std::size_t points_within_band() const;
  double fraction_within_band() const;
  double max_abs_residual() const;
};

// Empirical weak-form residual over replica trajectories sampled on a shared
// uniform time grid. `drift_source`, when given, supplies per-replica,
// per-snapshot target states for the drift evaluation (the reference ensemble
// of a nonlinear run); by default each snapshot interacts with itself.
template <int D>
WeakFormReport weak_form_residual(
    const std::vector<std::vector<ParticleState<D>>>& replicas,
    const std::vector<double>& times, const TestFunction& phi, const Kernel& kern,
    const WeakFormOpts& o = {},
    const std::vector<std::vector<ParticleState<D>>>* drift_source = nullptr) {
  const std::size_t nrep = replicas.size();
  if (nrep == 0) throw ConfigError("weak_form_residual: no replicas");
  const std::size_t ns = times.size();
  if (ns < 3) throw ConfigError("weak_form_residual: need at least 3 snapshots");
  for (const auto& r : replicas)
    if (r.size() != ns)
      throw ConfigError("weak_form_residual: replica snapshot count does not match grid");
  if (drift_source) {
    if (drift_source->size() != nrep)
      throw ConfigError("weak_form_residual: drift source replica count mismatch");
    for (const auto& r : *drift_source)
      if (r.size() != ns)
        throw ConfigError("weak_form_residual: drift source snapshot count mismatch");
  }
  const double spacing = times[1] - times[0];
  if (!(spacing > 0.0)) throw ConfigError("weak_form_residual: nonincreasing time grid");
  for (std::size_t j = 1; j + 1 < ns; ++j)
    if (std::abs((times[j + 1] - times[j]) - spacing) > 1e-9 * std::max(1.0, spacing))
      throw ConfigError("weak_form_residual: nonuniform snapshot spacing");

  // Per-replica Phi means and generator means at every snapshot.
  std::vector<std::vector<double>> m(nrep, std::vector<double>(ns, 0.0));
  std::vector<std::vector<double>> g(nrep, std::vector<double>(ns, 0.0));
  std::array<std::vector<double>, D> drifts;
  std::vector<double> vals, gens;
  for (std::size_t r = 0; r < nrep; ++r) {
    for (std::size_t j = 0; j < ns; ++j) {
      const ParticleState<D>& s = replicas[r][j];
      const ParticleState<D>& tgt = drift_source ? (*drift_source)[r][j] : s;
      const std::size_t n = s.n();
      if (n == 0) throw ConfigError("weak_form_residual: empty snapshot");
      mean_field_drifts(s, tgt, kern, o.path, o.workers, drifts);
      vals.resize(n);
      gens.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec<D> x = s.pos(i), v = s.vel(i);
        Vec<D> dr;
        for (int k = 0; k < D; ++k) dr[k] = drifts[k][i];
        vals[i] = phi.value<D>(x, v);
        gens[i] = generator_value<D>(phi, x, v, dr);
      }
      m[r][j] = mean(vals);
      g[r][j] = mean(gens);
    }
  }

  WeakFormReport rep;
  std::vector<double> rr(nrep), lh(nrep), rh(nrep);
  for (std::size_t j = 1; j + 1 < ns; ++j) {
    for (std::size_t r = 0; r < nrep; ++r) {
      lh[r] = (m[r][j + 1] - m[r][j - 1]) / (2.0 * spacing);
      rh[r] = g[r][j];
      rr[r] = lh[r] - rh[r];
    }
    rep.times.push_back(times[j]);
    rep.lhs.push_back(mean(lh));
    rep.rhs.push_back(mean(rh));
    rep.residual.push_back(mean(rr));
    rep.band.push_back(2.0 * stderr_of_mean(rr) + o.band_constant * o.dt);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sliced Wasserstein-2
// ---------------------------------------------------------------------------

// Exact 1-D W2 between two empirical measures (uniform weights, sizes may
// differ): quantile-function formula on the merged quantile grid.
double wasserstein2_1d(std::vector<double> a, std::vector<double> b);

// Mean over seeded random unit directions of the 1-D W2 of the projections.
// Points are rows of `a` and `b`; all rows must share the dimension `m`.
double sliced_w2(const std::vector<std::vector<double>>& a,
                 const std::vector<std::vector<double>>& b, std::size_t n_directions,
                 std::uint64_t seed);

inline constexpr std::size_t kSlicedW2Directions = 64;

// ---------------------------------------------------------------------------
// Circular kernel density estimate
// ---------------------------------------------------------------------------

// Rule-of-thumb bandwidth for n samples.
double default_kde_bandwidth(std::size_t n);

// Von Mises KDE of angle samples on the uniform grid theta_j = 2*pi*j/grid_n,
// concentration 1/bandwidth^2, renormalized to integrate to 1 with the
// periodic trapezoid rule.
std::vector<double> kde_circle(const std::vector<double>& angles, double bandwidth,
                               std::size_t grid_n = 256);

// Mean |f - g| * (2*pi) over a shared uniform grid — the L1 distance between
// two circle densities given by grid samples.
double l1_distance_on_grid(const std::vector<double>& f, const std::vector<double>& g);

}  // namespace vicsek
