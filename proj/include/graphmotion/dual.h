#pragma once
#include <array>
#include <cmath>

namespace gm {

// Forward-mode dual number carrying N partials. Enough of an operator set
// for the writhe expression (arithmetic, sqrt, asin).
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}
  static Dual var(double value, int slot) {
    Dual x(value);
    x.d[slot] = 1.0;
    return x;
  }

  Dual operator-() const {
    Dual r(-v);
    for (int i = 0; i < N; ++i) r.d[i] = -d[i];
    return r;
  }
  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.v / b.v);
    const double inv2 = 1.0 / (b.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
  }
};

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r(std::sqrt(a.v));
  const double s = r.v > 0.0 ? 0.5 / r.v : 0.0;
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * s;
  return r;
}

// asin with the argument clamped to [-1,1]; on the clamp branch the value is
// constant so the derivative is zero, matching the clamped primal.
template <int N>
Dual<N> asin_clamped(const Dual<N>& a) {
  if (a.v >= 1.0) return Dual<N>(std::asin(1.0));
  if (a.v <= -1.0) return Dual<N>(std::asin(-1.0));
  Dual<N> r(std::asin(a.v));
  const double s = 1.0 / std::sqrt(1.0 - a.v * a.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * s;
  return r;
}

inline double asin_clamped(double a) {
  return std::asin(a > 1.0 ? 1.0 : (a < -1.0 ? -1.0 : a));
}

}  // namespace gm
