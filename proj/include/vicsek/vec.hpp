#pragma once
// Small fixed-dimension vector used for positions, velocities, drifts and increments.

#include <cmath>

namespace vicsek {

template <int D>
struct Vec {
  static_assert(D == 2 || D == 3, "only d=2 and d=3 are supported");
  double c[D] = {};

  constexpr double& operator[](int i) { return c[i]; }
  constexpr double operator[](int i) const { return c[i]; }

  constexpr Vec& operator+=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (int i = 0; i < D; ++i) c[i] *= s;
    return *this;
  }
};

template <int D>
constexpr Vec<D> operator+(Vec<D> a, const Vec<D>& b) {
  return a += b;
}
template <int D>
constexpr Vec<D> operator-(Vec<D> a, const Vec<D>& b) {
  return a -= b;
}
template <int D>
constexpr Vec<D> operator*(double s, Vec<D> a) {
  return a *= s;
}
template <int D>
constexpr Vec<D> operator*(Vec<D> a, double s) {
  return a *= s;
}
template <int D>
constexpr Vec<D> operator-(const Vec<D>& a) {
  Vec<D> r;
  for (int i = 0; i < D; ++i) r.c[i] = -a.c[i];
  return r;
}

template <int D>
constexpr double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) s += a.c[i] * b.c[i];
  return s;
}

template <int D>
constexpr double norm2(const Vec<D>& a) {
  return dot(a, a);
}

template <int D>
inline double norm(const Vec<D>& a) {
  return std::sqrt(norm2(a));
}

template <int D>
constexpr bool operator==(const Vec<D>& a, const Vec<D>& b) {
  for (int i = 0; i < D; ++i)
    if (a.c[i] != b.c[i]) return false;
  return true;
}

}  // namespace vicsek
