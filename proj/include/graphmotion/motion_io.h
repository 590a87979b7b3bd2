#pragma once
#include <string>

#include "graphmotion/types.h"

namespace gm::io {

struct LoadedMotion {
  MotionSequence motion;
  Skeleton skeleton;
};

// Motion JSON layout:
//   {"fps": 30, "skeleton": "default22" | {...inline...},
//    "joints": ["root", ...], "frames": [[[x,y,z] * J] * L]}
// Parse failures and non-finite coordinates throw ValidationError naming the
// offending frame and joint.
void save_motion_json(const std::string& path, const MotionSequence& motion,
                      const Skeleton& skeleton);
LoadedMotion load_motion_json(const std::string& path);

// Binary layout: magic "GMO1", uint32 joints, uint32 frames, float64 fps,
// then frames*joints*3 float64 coordinates, all little endian.
void save_motion_gmo(const std::string& path, const MotionSequence& motion);
MotionSequence load_motion_gmo(const std::string& path);

// Dispatch on extension (.json / .gmo). The binary format carries no
// skeleton; 22 joints resolves to the default skeleton, anything else fails.
void save_motion(const std::string& path, const MotionSequence& motion, const Skeleton& skeleton);
LoadedMotion load_motion(const std::string& path);

std::string skeleton_to_json_text(const Skeleton& skeleton);
Skeleton skeleton_from_json_text(const std::string& text);

}  // namespace gm::io
