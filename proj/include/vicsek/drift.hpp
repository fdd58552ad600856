#pragma once
// Mean-field interaction sums and drifts.
//
//   S_i = (1/M) sum_{j<M} K(x_i - X_j)(v_i - V_j)      (target list X, V)
//   drift_i = -P(v_i) S_i
//
// The target list is the system itself for the interacting case and the
// reference ensemble for the nonlinear copies; the j = i self-term of the
// self-interacting case is an exact zero and is simply kept in the sum.
//
// Paths and their contracts:
//  * reference_sum: naive scalar loop with libm exp; the independent oracle for
//    tests and the serial baseline in bench/drift_bench. Agrees with the
//    production paths to ~1e-14 relative (libm vs fastexp), not bitwise.
//  * constant kernel: O(M) algebra, S_i = kappa (v_i - mean V). Checked against
//    the direct summation at floating-point tolerance.
//  * gaussian: vectorized row loop over all j (compact cutoffs are forbidden:
//    they would turn an exact computation into an approximation).
//  * mollified_tophat: a shared noinline per-pair term, evaluated either for
//    all j ascending (direct) or for cell-list candidates sorted ascending.
//    Terms outside the support are exact zeros — adding them cannot change a
//    finite accumulator — so both paths produce bit-identical sums.
//
// Every path computes row i independently of row order, so results are
// bit-identical for any worker count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vicsek/detail/fastexp.hpp"
#include "vicsek/detail/parallel.hpp"
#include "vicsek/kernel.hpp"
#include "vicsek/sphere.hpp"
#include "vicsek/state.hpp"
#include "vicsek/summation.hpp"
#include "vicsek/vec.hpp"

namespace vicsek {

enum class DriftPath { automatic, direct, cells };

template <int D>
struct SoA {
  const double* x[D];
  const double* v[D];
  std::size_t n;
};

template <int D>
inline SoA<D> soa(const ParticleState<D>& s) {
  SoA<D> t;
  for (int k = 0; k < D; ++k) {
    t.x[k] = s.x[k].data();
    t.v[k] = s.v[k].data();
  }
  t.n = s.n();
  return t;
}

namespace detail {

// ---- oracle / serial baseline -------------------------------------------------

template <int D>
inline Vec<D> reference_sum(const SoA<D>& t, const Vec<D>& xi, const Vec<D>& vi,
                            const Kernel& kern) {
  Vec<D> s{};
  for (std::size_t j = 0; j < t.n; ++j) {
    double r2 = 0.0;
    for (int k = 0; k < D; ++k) {
      const double d = xi[k] - t.x[k][j];
      r2 += d * d;
    }
    const double w = kern.eval_r2(r2);
    for (int k = 0; k < D; ++k) s[k] += w * (vi[k] - t.v[k][j]);
  }
  return (1.0 / static_cast<double>(t.n)) * s;
}

// ---- gaussian rows --------------------------------------------------------------

template <int D>
Vec<D> gaussian_row(const SoA<D>& t, const Vec<D>& xi, const Vec<D>& vi, double kappa,
                    double inv2l2);

template <>
inline Vec<2> gaussian_row<2>(const SoA<2>& t, const Vec<2>& xi, const Vec<2>& vi, double kappa,
                              double inv2l2) {
  const double* __restrict qx0 = t.x[0];
  const double* __restrict qx1 = t.x[1];
  const double* __restrict qv0 = t.v[0];
  const double* __restrict qv1 = t.v[1];
  const double x0 = xi[0], x1 = xi[1], u0 = vi[0], u1 = vi[1];
  double s0 = 0.0, s1 = 0.0;
#pragma omp simd reduction(+ : s0, s1)
  for (std::size_t j = 0; j < t.n; ++j) {
    const double d0 = x0 - qx0[j];
    const double d1 = x1 - qx1[j];
    const double w = kappa * exp_neg((d0 * d0 + d1 * d1) * inv2l2);
    s0 += w * (u0 - qv0[j]);
    s1 += w * (u1 - qv1[j]);
  }
  return {s0, s1};
}

template <>
inline Vec<3> gaussian_row<3>(const SoA<3>& t, const Vec<3>& xi, const Vec<3>& vi, double kappa,
                              double inv2l2) {
  const double* __restrict qx0 = t.x[0];
  const double* __restrict qx1 = t.x[1];
  const double* __restrict qx2 = t.x[2];
  const double* __restrict qv0 = t.v[0];
  const double* __restrict qv1 = t.v[1];
  const double* __restrict qv2 = t.v[2];
  const double x0 = xi[0], x1 = xi[1], x2 = xi[2];
  const double u0 = vi[0], u1 = vi[1], u2 = vi[2];
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
#pragma omp simd reduction(+ : s0, s1, s2)
  for (std::size_t j = 0; j < t.n; ++j) {
    const double d0 = x0 - qx0[j];
    const double d1 = x1 - qx1[j];
    const double d2 = x2 - qx2[j];
    const double w = kappa * exp_neg((d0 * d0 + d1 * d1 + d2 * d2) * inv2l2);
    s0 += w * (u0 - qv0[j]);
    s1 += w * (u1 - qv1[j]);
    s2 += w * (u2 - qv2[j]);
  }
  return {s0, s1, s2};
}

// ---- mollified top hat ---------------------------------------------------------

// One pair term. noinline keeps the codegen (and therefore the rounding) identical
// between the direct and cell-list call sites.
template <int D>
[[gnu::noinline]] void tophat_accumulate(double kappa, double inv_ell, double ell2,
                                         const Vec<D>& xi, const Vec<D>& vi, const SoA<D>& t,
                                         std::size_t j, Vec<D>& acc) {
  double r2 = 0.0;
  for (int k = 0; k < D; ++k) {
    const double d = xi[k] - t.x[k][j];
    r2 += d * d;
  }
  if (r2 >= ell2) return;  // exactly zero outside the support
  const double q = std::sqrt(r2) * inv_ell;
  double shape = 1.0;
  if (q > 0.8) {
    const double u = (q - 0.8) * 5.0;
    shape = 1.0 - u * u * (3.0 - 2.0 * u);
  }
  const double w = kappa * shape;
  for (int k = 0; k < D; ++k) acc[k] += w * (vi[k] - t.v[k][j]);
}

template <int D>
inline Vec<D> tophat_row_direct(const SoA<D>& t, const Vec<D>& xi, const Vec<D>& vi,
                                const Kernel& kern) {
  const double inv_ell = 1.0 / kern.ell;
  const double ell2 = kern.ell * kern.ell;
  Vec<D> acc{};
  for (std::size_t j = 0; j < t.n; ++j)
    tophat_accumulate<D>(kern.kappa, inv_ell, ell2, xi, vi, t, j, acc);
  return acc;
}

// Uniform grid over the target cloud with bin width = support radius.
template <int D>
struct CellList {
  double origin[D] = {};
  double inv_h = 0.0;
  int dims[D] = {};
  std::vector<std::uint32_t> start;  // ncells + 1 offsets
  std::vector<std::uint32_t> items;  // target indices, ascending within each cell
  bool usable = false;

  void build(const SoA<D>& t, double h, std::size_t max_cells) {
    usable = false;
    if (t.n == 0 || !(h > 0.0)) return;
    double lo[D], hi[D];
    for (int k = 0; k < D; ++k) lo[k] = hi[k] = t.x[k][0];
    for (std::size_t j = 1; j < t.n; ++j)
      for (int k = 0; k < D; ++k) {
        lo[k] = std::min(lo[k], t.x[k][j]);
        hi[k] = std::max(hi[k], t.x[k][j]);
      }
    std::size_t ncells = 1;
    for (int k = 0; k < D; ++k) {
      origin[k] = lo[k];
      const double span = hi[k] - lo[k];
      if (!std::isfinite(span)) return;
      dims[k] = static_cast<int>(span / h) + 1;
      ncells *= static_cast<std::size_t>(dims[k]);
      if (ncells > max_cells) return;  // cloud too sparse for binning to pay off
    }
    inv_h = 1.0 / h;
    start.assign(ncells + 1, 0);
    std::vector<std::uint32_t> cell_of(t.n);
    for (std::size_t j = 0; j < t.n; ++j) {
      std::uint32_t c = 0;
      for (int k = 0; k < D; ++k) {
        int ck = static_cast<int>((t.x[k][j] - origin[k]) * inv_h);
        ck = std::clamp(ck, 0, dims[k] - 1);
        c = c * static_cast<std::uint32_t>(dims[k]) + static_cast<std::uint32_t>(ck);
      }
      cell_of[j] = c;
      ++start[c + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c) start[c + 1] += start[c];
    items.resize(t.n);
    std::vector<std::uint32_t> fill(ncells, 0);
    for (std::size_t j = 0; j < t.n; ++j) {  // ascending j within each cell
      const std::uint32_t c = cell_of[j];
      items[start[c] + fill[c]++] = static_cast<std::uint32_t>(j);
    }
    usable = true;
  }

  // Candidate target indices within one bin of the query point, sorted ascending.
  void gather(const Vec<D>& xi, std::vector<std::uint32_t>& out) const {
    out.clear();
    int c[D];
    for (int k = 0; k < D; ++k)
      c[k] = static_cast<int>(std::floor((xi[k] - origin[k]) * inv_h));
    int lo[D], hi[D];
    for (int k = 0; k < D; ++k) {
      lo[k] = std::max(c[k] - 1, 0);
      hi[k] = std::min(c[k] + 1, dims[k] - 1);
      if (lo[k] > hi[k]) return;  // query more than one bin outside the cloud
    }
    const auto append_cell = [&](std::uint32_t c_lin) {
      out.insert(out.end(), items.begin() + start[c_lin], items.begin() + start[c_lin + 1]);
    };
    if constexpr (D == 2) {
      for (int a = lo[0]; a <= hi[0]; ++a)
        for (int b = lo[1]; b <= hi[1]; ++b)
          append_cell(static_cast<std::uint32_t>(a) * static_cast<std::uint32_t>(dims[1]) +
                      static_cast<std::uint32_t>(b));
    } else {
      for (int a = lo[0]; a <= hi[0]; ++a)
        for (int b = lo[1]; b <= hi[1]; ++b)
          for (int e = lo[2]; e <= hi[2]; ++e)
            append_cell((static_cast<std::uint32_t>(a) * static_cast<std::uint32_t>(dims[1]) +
                         static_cast<std::uint32_t>(b)) *
                            static_cast<std::uint32_t>(dims[2]) +
                        static_cast<std::uint32_t>(e));
    }
    std::sort(out.begin(), out.end());
  }
};

template <int D>
inline Vec<D> tophat_row_cells(const CellList<D>& cl, const SoA<D>& t, const Vec<D>& xi,
                               const Vec<D>& vi, const Kernel& kern,
                               std::vector<std::uint32_t>& scratch) {
  cl.gather(xi, scratch);
  const double inv_ell = 1.0 / kern.ell;
  const double ell2 = kern.ell * kern.ell;
  Vec<D> acc{};
  for (const std::uint32_t j : scratch)
    tophat_accumulate<D>(kern.kappa, inv_ell, ell2, xi, vi, t, j, acc);
  return acc;
}

template <int D>
inline Vec<D> mean_velocity(const SoA<D>& t) {
  Vec<D> m;
  for (int k = 0; k < D; ++k) m[k] = pairwise_sum(t.v[k], t.n) / static_cast<double>(t.n);
  return m;
}

}  // namespace detail

// Unprojected interaction sums S_i for every particle of `self` against `tgt`.
template <int D>
void interaction_sums(const ParticleState<D>& self, const ParticleState<D>& tgt,
                      const Kernel& kern, DriftPath path, int workers,
                      std::array<std::vector<double>, static_cast<std::size_t>(D)>& out) {
  const std::size_t n = self.n();
  const SoA<D> t = soa(tgt);
  for (int k = 0; k < D; ++k) out[k].resize(n);
  const double inv_m = 1.0 / static_cast<double>(t.n);

  switch (kern.kind) {
    case KernelKind::constant: {
      // (1/M) sum_j kappa (v_i - V_j) = kappa (v_i - mean V), exactly in algebra
      // and to rounding here; checked against the direct sum by tests.
      const Vec<D> mv = detail::mean_velocity(t);
      detail::parallel_rows(n, workers, [&](std::size_t i) {
        const Vec<D> s = kern.kappa * (self.vel(i) - mv);
        for (int k = 0; k < D; ++k) out[k][i] = s[k];
      });
      return;
    }
    case KernelKind::gaussian: {
      const double inv2l2 = 1.0 / (2.0 * kern.ell * kern.ell);
      detail::parallel_rows(n, workers, [&](std::size_t i) {
        const Vec<D> s = detail::gaussian_row<D>(t, self.pos(i), self.vel(i), kern.kappa, inv2l2);
        for (int k = 0; k < D; ++k) out[k][i] = s[k] * inv_m;
      });
      return;
    }
    case KernelKind::mollified_tophat: {
      detail::CellList<D> cl;
      const bool want_cells = (path == DriftPath::cells) ||
                              (path == DriftPath::automatic && n * t.n > 16384);
      if (want_cells) cl.build(t, kern.ell, 8 * t.n + 64);
      if (cl.usable) {
#ifdef _OPENMP
        if (workers > 1 && n > 1) {
          std::exception_ptr err = nullptr;
#pragma omp parallel num_threads(workers)
          {
            std::vector<std::uint32_t> scratch;
            scratch.reserve(256);
#pragma omp for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
              try {
                const std::size_t ii = static_cast<std::size_t>(i);
                const Vec<D> s =
                    detail::tophat_row_cells(cl, t, self.pos(ii), self.vel(ii), kern, scratch);
                for (int k = 0; k < D; ++k) out[k][ii] = s[k] * inv_m;
              } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
              }
            }
          }
          if (err) std::rethrow_exception(err);
          return;
        }
#endif
        std::vector<std::uint32_t> scratch;
        scratch.reserve(256);
        for (std::size_t i = 0; i < n; ++i) {
          const Vec<D> s = detail::tophat_row_cells(cl, t, self.pos(i), self.vel(i), kern, scratch);
          for (int k = 0; k < D; ++k) out[k][i] = s[k] * inv_m;
        }
        return;
      }
      detail::parallel_rows(n, workers, [&](std::size_t i) {
        const Vec<D> s = detail::tophat_row_direct(t, self.pos(i), self.vel(i), kern);
        for (int k = 0; k < D; ++k) out[k][i] = s[k] * inv_m;
      });
      return;
    }
  }
}

// Projected drifts: out[.][i] = -P(v_i) S_i.
template <int D>
void mean_field_drifts(const ParticleState<D>& self, const ParticleState<D>& tgt,
                       const Kernel& kern, DriftPath path, int workers,
                       std::array<std::vector<double>, static_cast<std::size_t>(D)>& out) {
  interaction_sums(self, tgt, kern, path, workers, out);
  const std::size_t n = self.n();
  detail::parallel_rows(n, workers, [&](std::size_t i) {
    Vec<D> s;
    for (int k = 0; k < D; ++k) s[k] = out[k][i];
    const Vec<D> d = -tangent_project(self.vel(i), s);
    for (int k = 0; k < D; ++k) out[k][i] = d[k];
  });
}

// Single-index drift against the system's own empirical measure. Uses the
// plain per-pair sum, so exact-zero cases (one particle, aligned flock) are
// exact zeros bit for bit.
template <int D>
Vec<D> empirical_mean_field_drift(const ParticleState<D>& s, const Kernel& kern, std::size_t i) {
  if (i >= s.n()) throw ConfigError("empirical_mean_field_drift: particle index out of range");
  const Vec<D> sum = detail::reference_sum(soa(s), s.pos(i), s.vel(i), kern);
  return -tangent_project(s.vel(i), sum);
}

// Drift of a nonlinear copy at (x, v) against a reference ensemble.
template <int D>
Vec<D> nonlinear_drift(const Vec<D>& x, const Vec<D>& v, const ParticleState<D>& ensemble,
                       const Kernel& kern) {
  if (ensemble.n() == 0) throw ConfigError("nonlinear_drift: empty reference ensemble");
  return -tangent_project(v, detail::reference_sum(soa(ensemble), x, v, kern));
}

}  // namespace vicsek
