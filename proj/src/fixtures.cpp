#include "graphmotion/fixtures.h"

#include <cmath>

namespace gm::fixtures {

Skeleton path_skeleton(int joints) {
  if (joints < 2) throw ValidationError("path skeleton needs at least 2 joints");
  Skeleton s;
  s.name = "path" + std::to_string(joints);
  s.parents.assign(joints, -1);
  std::vector<int> chain;
  for (int j = 0; j < joints; ++j) {
    s.joint_names.push_back("j" + std::to_string(j));
    if (j > 0) s.parents[j] = j - 1;
    chain.push_back(j);
  }
  s.chains = {chain, {joints - 1}, {joints - 1}, {joints - 1}, {joints - 1}};
  s.validate();
  return s;
}

Skeleton star_skeleton() {
  Skeleton s;
  s.name = "star8";
  for (int j = 0; j < 8; ++j) s.joint_names.push_back("c" + std::to_string(j));
  s.parents = {-1, 0, 0, 0, 0, 0, 0, 0};
  s.chains = {{1, 0, 2}, {3, 0, 4}, {5, 0, 6}, {7, 0}, {0}};
  s.validate();
  return s;
}

Skeleton bone_skeleton() {
  Skeleton s;
  s.name = "bone2";
  s.joint_names = {"a", "b"};
  s.parents = {-1, 0};
  s.chains = {{0, 1}, {1}, {1}, {1}, {1}};
  s.validate();
  return s;
}

namespace {
MotionSequence loop_motion(const std::vector<Vec3>& corners) {
  // 5 joints, last repeats the first so the serial chain closes.
  MotionSequence m(1, 5, 30);
  for (int j = 0; j < 4; ++j) m.at(0, j) = corners[j];
  m.at(0, 4) = corners[0];
  return m;
}
}  // namespace

MotionSequence hopf_a() {
  return loop_motion({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}});
}

MotionSequence hopf_b() {
  return loop_motion({{2, 0, 0}, {1, 0, 1}, {0, 0, 0}, {1, 0, -1}});
}

MotionSequence hopf_b_far() {
  MotionSequence m = hopf_b();
  for (auto& p : m.data) p += Vec3(10, 0, 0);
  return m;
}

MotionSequence cube_points(const Vec3& lo, double side, int frames) {
  MotionSequence m(frames, 8, 30);
  for (int f = 0; f < frames; ++f)
    for (int j = 0; j < 8; ++j)
      m.at(f, j) = lo + side * Vec3((j >> 0) & 1, (j >> 1) & 1, (j >> 2) & 1);
  return m;
}

MotionSequence base_translated(const Vec3& root_pos, int frames) {
  const Skeleton& s = default_skeleton();
  const Vec3 shift = root_pos - s.base_pose[0];
  MotionSequence m(frames, s.joint_count(), 30);
  for (int f = 0; f < frames; ++f)
    for (int j = 0; j < m.joints; ++j) m.at(f, j) = s.base_pose[j] + shift;
  return m;
}

namespace {
MotionSequence sliding_base(int frames, double dy) {
  const Skeleton& s = default_skeleton();
  MotionSequence m(frames, s.joint_count(), 30);
  for (int f = 0; f < frames; ++f) {
    const Vec3 shift(0.03 * f, dy, 0.0);
    for (int j = 0; j < m.joints; ++j) m.at(f, j) = s.base_pose[j] + shift;
  }
  return m;
}
}  // namespace

MotionSequence skating_motion(int frames) { return sliding_base(frames, -0.02); }

MotionSequence airborne_motion(int frames) { return sliding_base(frames, 0.05); }

MotionSequence parallel_bone(double y, int frames) {
  MotionSequence m(frames, 2, 30);
  for (int f = 0; f < frames; ++f) {
    m.at(f, 0) = Vec3(0, y, 0);
    m.at(f, 1) = Vec3(1, y, 0);
  }
  return m;
}

MotionSequence windmill_motion(int frames, double revs) {
  const Skeleton& s = default_skeleton();
  const Vec3 shoulder = s.base_pose[6];
  const double radii[3] = {0.25, 0.5, 0.65};
  MotionSequence m(frames, s.joint_count(), 30);
  for (int f = 0; f < frames; ++f) {
    const double th = 2.0 * M_PI * revs * f / frames;
    for (int j = 0; j < m.joints; ++j) m.at(f, j) = s.base_pose[j];
    for (int k = 0; k < 3; ++k)
      m.at(f, 7 + k) = shoulder + radii[k] * Vec3(std::cos(th), std::sin(th), 0.0);
  }
  return m;
}

std::pair<MotionSequence, MotionSequence> wraparound_pair() {
  MotionSequence b = base_translated(Vec3(0, 1, 0), 1);
  MotionSequence a = base_translated(Vec3(1.2, 1, 0), 1);
  // Right arm coils one full turn around the other character's torso axis.
  for (int k = 0; k < 4; ++k) {
    const double th = 2.0 * M_PI * k / 3.0;
    a.at(0, 6 + k) = Vec3(0.25 * std::cos(th), 1.1 + 0.1 * k, 0.25 * std::sin(th));
  }
  return {std::move(a), std::move(b)};
}

}  // namespace gm::fixtures
