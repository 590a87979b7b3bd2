#pragma once
#include <array>
#include <optional>
#include <vector>

#include "graphmotion/types.h"

namespace gm::gli {

using Polyline = std::vector<Vec3>;

struct GliFlags {
  bool degenerate = false;  // zero-length segment encountered
  bool singular = false;    // segments touching, value undefined at contact
  GliFlags& operator|=(const GliFlags& o) {
    degenerate |= o.degenerate;
    singular |= o.singular;
    return *this;
  }
  bool any() const { return degenerate || singular; }
};

inline constexpr double kDegenerateEps = 1e-9;  // meters

// Signed writhe of segment pair (a->b, c->d), normalized so that summing
// over two closed polygons gives their integer linking number. Value is in
// [-0.5, 0.5]. Degenerate or touching inputs return 0 and set flags.
double segment_writhe(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                      GliFlags* flags = nullptr);

// Partials of segment_writhe w.r.t. the four endpoints, forward-mode exact.
std::array<Vec3, 4> segment_writhe_gradient(const Vec3& a, const Vec3& b, const Vec3& c,
                                            const Vec3& d, GliFlags* flags = nullptr);

// Central-difference fallback behind the same interface (debugging aid).
std::array<Vec3, 4> segment_writhe_gradient_fd(const Vec3& a, const Vec3& b, const Vec3& c,
                                               const Vec3& d, double h = 1e-5);

// Sum of segment_writhe over all segment pairs of two polylines.
double chain_gli(const Polyline& s1, const Polyline& s2, GliFlags* flags = nullptr);

// Midpoint-rule quadrature of the double line integral
// (1/4pi) * integral of (dr1 x dr2 . (r1-r2)) / |r1-r2|^3.
// Touching chains make the integrand singular; reports failure as nullopt.
std::optional<double> gli_numeric_oracle(const Polyline& s1, const Polyline& s2,
                                         int subdivisions);

struct GliMatrix {
  std::array<std::array<double, 5>, 5> value{};
  std::array<std::array<GliFlags, 5>, 5> flags{};
};

// Chain-pair GLI between two characters' poses: entry (a,b) couples chain a
// of pose_i with chain b of pose_j.
GliMatrix pose_pair_gli(std::span<const Vec3> pose_i, std::span<const Vec3> pose_j,
                        const Skeleton& skeleton);

}  // namespace gm::gli
