#pragma once
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphmotion/types.h"

namespace gm::metrics {

struct PairPenetration {
  std::string a, b;
  double pene_bone = 0.0;
  double contact = 0.0;
  double cframe = 0.0;
};

struct MetricsReport {
  double pene_bone = 0.0;       // meters, per-pair frame-averaged depth, summed over pairs
  double contact = 0.0;         // mean penetrating bone-pair count per frame
  double cframe = 0.0;          // percent of frames with any penetration
  std::optional<double> skating_ratio;  // absent when no character has foot joints
  double jitter = 0.0;          // m/s^3, mean third-difference magnitude
  std::vector<PairPenetration> pairs;
  std::vector<std::pair<std::string, double>> skating_per_character;
  std::vector<std::pair<std::string, double>> jitter_per_character;
  std::string to_json() const;
};

// Bones are capsules of the given radius; penetration of a bone pair is
// max(0, 2 radius - segment distance). Per character pair the depths are
// summed over frames and bone pairs then divided by frame count; pairs are
// then summed. One character gives 0.
double pene_bone(const MultiPersonMotion& multi, const Skeleton& skeleton, double radius = 0.02);
double pair_pene_bone(const MotionSequence& a, const MotionSequence& b, const Skeleton& skeleton,
                      double radius = 0.02);

// contact: mean over frames of the number of penetrating inter-character
// bone pairs; cframe: 100 x fraction of frames with at least one.
std::pair<double, double> contact_and_cframe(const MultiPersonMotion& multi,
                                             const Skeleton& skeleton, double radius = 0.02);

// Fraction of frame transitions where a foot stays under 0.05 m at both ends
// yet moves more than 0.025 m horizontally.
double skating_ratio(const MotionSequence& motion, const Skeleton& skeleton);

// Mean norm of the third finite difference of joint positions, scaled by
// fps^3 (units m/s^3). Needs at least 4 frames.
double jitter(const MotionSequence& motion);

MetricsReport evaluate(const MultiPersonMotion& multi, const Skeleton& skeleton,
                       double radius = 0.02);

// Per-frame per-pair penetration depth rows: frame, char_a, char_b, depth.
std::string penetration_csv(const MultiPersonMotion& multi, const Skeleton& skeleton,
                            double radius = 0.02);

}  // namespace gm::metrics
