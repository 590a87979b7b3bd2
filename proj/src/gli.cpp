#include "graphmotion/gli.h"

#include <cmath>

#include <Eigen/Geometry>

#include "graphmotion/dual.h"

namespace gm::gli {
namespace {

constexpr double kPi = 3.14159265358979323846;

template <typename T>
struct TV3 {
  T x, y, z;
};

template <typename T>
TV3<T> sub(const TV3<T>& a, const TV3<T>& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
template <typename T>
TV3<T> cross(const TV3<T>& a, const TV3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <typename T>
T dot(const TV3<T>& a, const TV3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) {
  return x.v;
}

template <typename T>
TV3<T> normalized_or_zero(const TV3<T>& v) {
  using gm::sqrt;
  using std::sqrt;
  T n2 = dot(v, v);
  if (value_of(n2) < 1e-24) return {T(0.0), T(0.0), T(0.0)};
  T inv = T(1.0) / sqrt(n2);
  return {v.x * inv, v.y * inv, v.z * inv};
}

// Tetrahedron-normal form of the writhe of two line segments. The sign
// factor is pinned by agreement with the quadrature of the linking integral
// (and by closed loops summing to integers).
template <typename T>
T writhe_core(const TV3<T>& a, const TV3<T>& b, const TV3<T>& c, const TV3<T>& d) {
  using gm::asin_clamped;
  const TV3<T> v_ac = sub(c, a), v_ad = sub(d, a), v_bd = sub(d, b), v_bc = sub(c, b);
  const TV3<T> na = normalized_or_zero(cross(v_ac, v_ad));
  const TV3<T> nb = normalized_or_zero(cross(v_ad, v_bd));
  const TV3<T> nc = normalized_or_zero(cross(v_bd, v_bc));
  const TV3<T> nd = normalized_or_zero(cross(v_bc, v_ac));
  T s = asin_clamped(dot(na, nb)) + asin_clamped(dot(nb, nc)) + asin_clamped(dot(nc, nd)) +
        asin_clamped(dot(nd, na));
  const TV3<T> v_cd = sub(d, c), v_ab = sub(b, a);
  const double sgn = value_of(dot(cross(v_cd, v_ab), v_ac)) >= 0.0 ? 1.0 : -1.0;
  return s * T(sgn / (4.0 * kPi));
}

bool check_degenerate(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                      GliFlags* flags) {
  if ((b - a).norm() <= kDegenerateEps || (d - c).norm() <= kDegenerateEps) {
    if (flags) flags->degenerate = true;
    return true;
  }
  if (segment_distance(a, b, c, d) <= kDegenerateEps) {
    if (flags) flags->singular = true;
    return true;
  }
  return false;
}

TV3<double> tv(const Vec3& p) { return {p.x(), p.y(), p.z()}; }

}  // namespace

double segment_writhe(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                      GliFlags* flags) {
  if (check_degenerate(a, b, c, d, flags)) return 0.0;
  return writhe_core(tv(a), tv(b), tv(c), tv(d));
}

std::array<Vec3, 4> segment_writhe_gradient(const Vec3& a, const Vec3& b, const Vec3& c,
                                            const Vec3& d, GliFlags* flags) {
  std::array<Vec3, 4> grad{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  if (check_degenerate(a, b, c, d, flags)) return grad;
  using D = Dual<12>;
  const Vec3* pts[4] = {&a, &b, &c, &d};
  TV3<D> v[4];
  for (int i = 0; i < 4; ++i)
    v[i] = {D::var(pts[i]->x(), 3 * i), D::var(pts[i]->y(), 3 * i + 1),
            D::var(pts[i]->z(), 3 * i + 2)};
  const D w = writhe_core(v[0], v[1], v[2], v[3]);
  for (int i = 0; i < 4; ++i) grad[i] = Vec3(w.d[3 * i], w.d[3 * i + 1], w.d[3 * i + 2]);
  return grad;
}

std::array<Vec3, 4> segment_writhe_gradient_fd(const Vec3& a, const Vec3& b, const Vec3& c,
                                               const Vec3& d, double h) {
  std::array<Vec3, 4> grad;
  Vec3 pts[4] = {a, b, c, d};
  for (int i = 0; i < 4; ++i)
    for (int ax = 0; ax < 3; ++ax) {
      Vec3 hi[4] = {pts[0], pts[1], pts[2], pts[3]};
      Vec3 lo[4] = {pts[0], pts[1], pts[2], pts[3]};
      hi[i][ax] += h;
      lo[i][ax] -= h;
      grad[i][ax] = (segment_writhe(hi[0], hi[1], hi[2], hi[3]) -
                     segment_writhe(lo[0], lo[1], lo[2], lo[3])) /
                    (2.0 * h);
    }
  return grad;
}

double chain_gli(const Polyline& s1, const Polyline& s2, GliFlags* flags) {
  double sum = 0.0;
  for (size_t i = 0; i + 1 < s1.size(); ++i)
    for (size_t j = 0; j + 1 < s2.size(); ++j)
      sum += segment_writhe(s1[i], s1[i + 1], s2[j], s2[j + 1], flags);
  return sum;
}

std::optional<double> gli_numeric_oracle(const Polyline& s1, const Polyline& s2,
                                         int subdivisions) {
  for (size_t i = 0; i + 1 < s1.size(); ++i)
    for (size_t j = 0; j + 1 < s2.size(); ++j)
      if (segment_distance(s1[i], s1[i + 1], s2[j], s2[j + 1]) <= kDegenerateEps)
        return std::nullopt;
  const int n = subdivisions;
  double sum = 0.0;
  for (size_t i = 0; i + 1 < s1.size(); ++i) {
    const Vec3 d1 = (s1[i + 1] - s1[i]) / n;
    for (size_t j = 0; j + 1 < s2.size(); ++j) {
      const Vec3 d2 = (s2[j + 1] - s2[j]) / n;
      const Vec3 x = d1.cross(d2);
      for (int u = 0; u < n; ++u) {
        const Vec3 m1 = s1[i] + d1 * (u + 0.5);
        for (int v = 0; v < n; ++v) {
          const Vec3 m2 = s2[j] + d2 * (v + 0.5);
          const Vec3 r = m1 - m2;
          const double rn = r.norm();
          sum += x.dot(r) / (rn * rn * rn);
        }
      }
    }
  }
  return sum / (4.0 * kPi);
}

GliMatrix pose_pair_gli(std::span<const Vec3> pose_i, std::span<const Vec3> pose_j,
                        const Skeleton& skeleton) {
  const auto chains_i = decompose_chains(pose_i, skeleton);
  const auto chains_j = decompose_chains(pose_j, skeleton);
  GliMatrix m;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      m.value[a][b] = chain_gli(chains_i[a], chains_j[b], &m.flags[a][b]);
  return m;
}

}  // namespace gm::gli
