#include "graphmotion/types.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace gm {

std::vector<std::pair<int, int>> Skeleton::bones() const {
  std::vector<std::pair<int, int>> out;
  for (int j = 1; j < joint_count(); ++j) out.emplace_back(parents[j], j);
  return out;
}

void Skeleton::validate() const {
  const int J = joint_count();
  if (J == 0) throw ValidationError("skeleton has no joints");
  if (int(parents.size()) != J) throw ValidationError("parents size mismatch");
  if (parents[0] != -1) throw ValidationError("joint 0 must be the root");
  for (int j = 1; j < J; ++j)
    if (parents[j] < 0 || parents[j] >= J)
      throw ValidationError("parent index out of range at joint " + std::to_string(j));
  // tree check: every joint reaches the root without revisiting
  for (int j = 0; j < J; ++j) {
    int hops = 0, cur = j;
    while (cur != 0) {
      cur = parents[cur];
      if (++hops > J) throw ValidationError("parent links contain a cycle");
    }
  }
  if (chains.size() != 5) throw ValidationError("expected exactly 5 chains");
  std::set<int> covered;
  for (const auto& chain : chains) {
    if (chain.empty()) throw ValidationError("empty chain");
    for (int j : chain) {
      if (j < 0 || j >= J) throw ValidationError("chain joint out of range");
      covered.insert(j);
    }
    for (size_t k = 0; k + 1 < chain.size(); ++k) {
      int a = chain[k], b = chain[k + 1];
      if (parents[a] != b && parents[b] != a)
        throw ValidationError("chain edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") is not a tree edge");
    }
  }
  if (int(covered.size()) != J) throw ValidationError("chains do not cover all joints");
  for (int f : foot_joints)
    if (f < 0 || f >= J) throw ValidationError("foot joint out of range");
  if (!base_pose.empty() && int(base_pose.size()) != J)
    throw ValidationError("base pose size mismatch");
}

MotionSequence MotionSequence::slice(int f0, int f1) const {
  MotionSequence out(f1 - f0, joints, fps);
  std::copy(data.begin() + size_t(f0) * joints, data.begin() + size_t(f1) * joints,
            out.data.begin());
  return out;
}

bool MotionSequence::all_finite() const {
  for (const Vec3& p : data)
    if (!p.allFinite()) return false;
  return true;
}

void MultiPersonMotion::validate() const {
  std::set<std::string> ids;
  for (const auto& [id, m] : characters) {
    if (!ids.insert(id).second) throw ValidationError("duplicate character id " + id);
    if (m.frames() != characters.front().second.frames() ||
        m.fps != characters.front().second.fps)
      throw ValidationError("character " + id + " frame count or fps mismatch");
  }
}

const MotionSequence* MultiPersonMotion::find(const std::string& id) const {
  for (const auto& [cid, m] : characters)
    if (cid == id) return &m;
  return nullptr;
}

std::vector<std::vector<Vec3>> decompose_chains(std::span<const Vec3> pose,
                                                const Skeleton& skeleton) {
  if (int(pose.size()) != skeleton.joint_count())
    throw ValidationError("pose/skeleton size mismatch");
  std::vector<std::vector<Vec3>> out;
  out.reserve(5);
  for (const auto& chain : skeleton.chains) {
    std::vector<Vec3> poly;
    poly.reserve(chain.size());
    for (int j : chain) poly.push_back(pose[j]);
    out.push_back(std::move(poly));
  }
  return out;
}

Aabb frame_aabb(std::span<const Vec3> pose, double padding) {
  if (pose.empty()) throw ValidationError("empty pose");
  Aabb box{pose[0], pose[0]};
  for (const Vec3& p : pose) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  box.min.array() -= padding;
  box.max.array() += padding;
  return box;
}

double aabb_overlap_volume(const Aabb& a, const Aabb& b) {
  double vol = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    double len = std::min(a.max[ax], b.max[ax]) - std::max(a.min[ax], b.min[ax]);
    if (len <= 0.0) return 0.0;
    vol *= len;
  }
  return vol;
}

std::vector<Vec3> root_trajectory(const MotionSequence& motion) {
  std::vector<Vec3> out;
  out.reserve(motion.frames());
  for (int f = 0; f < motion.frames(); ++f) out.push_back(motion.at(f, 0));
  return out;
}

// Ericson-style clamped closest points.
double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  const double a = d1.dot(d1), e = d2.dot(d2), f = d2.dot(r);
  const double eps = 1e-12;
  double s = 0.0, t = 0.0;
  if (a <= eps && e <= eps) return r.norm();
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2), den = a * e - b * b;
      s = den > eps ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (p1 + d1 * s - (p2 + d2 * t)).norm();
}

const Skeleton& default_skeleton() {
  static const Skeleton skel = [] {
    Skeleton s;
    s.name = "default22";
    s.joint_names = {"root",       "spine1",     "spine2",     "spine3",  "neck",
                     "head",       "shoulder_r", "elbow_r",    "wrist_r", "hand_r",
                     "shoulder_l", "elbow_l",    "wrist_l",    "hand_l",  "hip_r",
                     "knee_r",     "ankle_r",    "foot_r",     "hip_l",   "knee_l",
                     "ankle_l",    "foot_l"};
    s.parents = {-1, 0, 1, 2, 3, 4, 3, 6, 7, 8, 3, 10, 11, 12, 0, 14, 15, 16, 0, 18, 19, 20};
    s.chains = {{0, 1, 2, 3, 4, 5},      // torso + head
                {6, 7, 8, 9},            // right arm (+x)
                {10, 11, 12, 13},        // left arm (-x)
                {14, 15, 16, 17},        // right leg
                {18, 19, 20, 21}};       // left leg
    s.foot_joints = {17, 21};
    s.base_pose = {
        {0.0, 1.0, 0.0},   {0.0, 1.15, 0.0}, {0.0, 1.3, 0.0},   {0.0, 1.45, 0.0},
        {0.0, 1.55, 0.0},  {0.0, 1.7, 0.0},  {0.2, 1.5, 0.0},   {0.45, 1.5, 0.0},
        {0.7, 1.5, 0.0},   {0.85, 1.5, 0.0}, {-0.2, 1.5, 0.0},  {-0.45, 1.5, 0.0},
        {-0.7, 1.5, 0.0},  {-0.85, 1.5, 0.0},{0.1, 0.9, 0.0},   {0.1, 0.5, 0.0},
        {0.1, 0.1, 0.0},   {0.1, 0.05, 0.12},{-0.1, 0.9, 0.0},  {-0.1, 0.5, 0.0},
        {-0.1, 0.1, 0.0},  {-0.1, 0.05, 0.12}};
    s.validate();
    return s;
  }();
  return skel;
}

}  // namespace gm
