#pragma once
#include <Eigen/Core>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gm {

using Vec3 = Eigen::Vector3d;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Aabb {
  Vec3 min, max;
};

// Skeleton: joints 0..J-1, parents form a tree rooted at joint 0, and the
// five chains are tree paths that jointly cover every joint.
struct Skeleton {
  std::string name;
  std::vector<std::string> joint_names;
  std::vector<int> parents;               // parents[0] == -1
  std::vector<std::vector<int>> chains;   // exactly 5, ordered joint paths
  std::vector<int> foot_joints;           // used by the skating metric
  std::vector<Vec3> base_pose;            // rest pose, may be empty

  int joint_count() const { return int(joint_names.size()); }
  std::vector<std::pair<int, int>> bones() const;  // (parent, child) tree edges
  void validate() const;                           // throws ValidationError
};

struct MotionSequence {
  int fps = 30;
  int joints = 0;
  std::vector<Vec3> data;  // frame-major, size frames()*joints

  MotionSequence() = default;
  MotionSequence(int frames, int joints_, int fps_ = 30)
      : fps(fps_), joints(joints_), data(size_t(frames) * joints_, Vec3::Zero()) {}

  int frames() const { return joints ? int(data.size() / joints) : 0; }
  Vec3& at(int f, int j) { return data[size_t(f) * joints + j]; }
  const Vec3& at(int f, int j) const { return data[size_t(f) * joints + j]; }
  std::span<Vec3> pose(int f) { return {data.data() + size_t(f) * joints, size_t(joints)}; }
  std::span<const Vec3> pose(int f) const {
    return {data.data() + size_t(f) * joints, size_t(joints)};
  }
  MotionSequence slice(int f0, int f1) const;  // frames [f0, f1)
  bool all_finite() const;
};

struct MultiPersonMotion {
  std::vector<std::pair<std::string, MotionSequence>> characters;
  void validate() const;  // same L, fps; unique ids
  const MotionSequence* find(const std::string& id) const;
};

std::vector<std::vector<Vec3>> decompose_chains(std::span<const Vec3> pose,
                                                const Skeleton& skeleton);

Aabb frame_aabb(std::span<const Vec3> pose, double padding = 0.0);

double aabb_overlap_volume(const Aabb& a, const Aabb& b);

std::vector<Vec3> root_trajectory(const MotionSequence& motion);

// Closest distance between segments p1q1 and p2q2 (clamped closest points).
double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2);

// 22-joint humanoid, Y-up, ground y=0; chains: torso+head, both arms, both legs.
const Skeleton& default_skeleton();

}  // namespace gm
