#pragma once
#include <utility>

#include "graphmotion/types.h"

namespace gm::fixtures {

// Single serial chain 0..n-1 plus singleton chains to satisfy the 5-chain
// skeleton contract; no foot joints.
Skeleton path_skeleton(int joints);

// 8 joints laid out as unit-cube corners, star parented at joint 0.
Skeleton star_skeleton();

// Two joints, one bone.
Skeleton bone_skeleton();

// Closed square loops on path_skeleton(5): the last joint repeats the first,
// so the 4-segment chain is a closed polygon. Linked as a Hopf pair.
MotionSequence hopf_a();
MotionSequence hopf_b();
MotionSequence hopf_b_far();  // translated clear of hopf_a, unlinked

// star_skeleton corners of the axis-aligned cube [lo, lo+side]^3.
MotionSequence cube_points(const Vec3& lo, double side, int frames);

// Default-skeleton rest pose rigidly placed with the root at root_pos.
MotionSequence base_translated(const Vec3& root_pos, int frames);

// Rigid whole-body slide of 0.03 m per frame with feet at 0.03 m height.
MotionSequence skating_motion(int frames = 10);
// Same slide with feet at 0.10 m: airborne, not skating.
MotionSequence airborne_motion(int frames = 10);

// bone_skeleton bone from (0,y,0) to (1,y,0), static.
MotionSequence parallel_bone(double y, int frames);

// Default skeleton with the +x arm joints circling the shoulder in the x-y
// plane, revs turns over the sequence.
MotionSequence windmill_motion(int frames = 24, double revs = 2.0);

// One-frame pair: A's +x arm spirals one full turn around B's vertical
// torso, giving an arm-torso GLI entry above 0.5 in magnitude.
std::pair<MotionSequence, MotionSequence> wraparound_pair();

}  // namespace gm::fixtures
