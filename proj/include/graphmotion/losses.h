#pragma once
#include <vector>

#include "graphmotion/gli.h"
#include "graphmotion/graph.h"
#include "graphmotion/report.h"
#include "graphmotion/types.h"

namespace gm::losses {

// Half-open timestep window [lo, hi): a loss is active at t when lo <= t < hi.
struct Window {
  int lo = 0, hi = 0;
  bool contains(int t) const { return t >= lo && t < hi; }
};

struct GuidanceLossConfig {
  double gli_threshold = 0.4;     // hinge on |dGLI| between consecutive frames
  double gli_weight = 0.0;
  double proxemics_weight = 0.0;
  double contact_weight = 0.0;    // overlap baseline on connected pairs
  double aabb_padding = 0.0;      // meters, applied to both boxes
  double root_distance_min = 0.0; // meters, 0 disables the root hinge
  double tau = 0.01;              // soft-face temperature, meters
  Window gli_window{0, 100};
  Window proxemics_window{0, 700};
  Window contact_window{0, 100};

  void validate(int T) const;  // throws ValidationError
};

struct LossResult {
  double value = 0.0;
  std::vector<Vec3> grad;  // frame-major, layout of the first motion argument
  gli::GliFlags flags;
};

// Hinge on per-chain-pair GLI jumps between consecutive frames. The second
// motion is a constant condition; only the first receives gradient.
LossResult gli_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                    const Skeleton& skeleton, const GuidanceLossConfig& cfg);

// Per-frame padded soft-AABB overlap volume plus the optional root-distance
// hinge, summed over frames.
LossResult proxemics_loss(const MotionSequence& motion_i, const MotionSequence& motion_k,
                          const Skeleton& skeleton, const GuidanceLossConfig& cfg);

// Overlap machinery alone (no root term), the ablation baseline for pairs
// that interact directly.
LossResult simple_contact_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                               const Skeleton& skeleton, const GuidanceLossConfig& cfg);

// Pair evaluation returning gradients for both characters from one pass.
// mask (empty = all frames) selects contributing frames; a GLI transition
// contributes only when both of its frames are selected.
struct PairLossResult {
  double value = 0.0;
  std::vector<Vec3> grad_i, grad_j;
  gli::GliFlags flags;
};

PairLossResult pair_gli_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                             const Skeleton& skeleton, const GuidanceLossConfig& cfg,
                             const std::vector<char>& mask);
PairLossResult pair_overlap_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                                 const Skeleton& skeleton, const GuidanceLossConfig& cfg,
                                 const std::vector<char>& mask, bool with_root_term);

struct GraphLossResult {
  std::vector<std::vector<Vec3>> grads;  // per character in graph order, weighted
  std::vector<GuidanceRecord> records;
  double total = 0.0;  // weighted sum of active losses
};

// GLI (and the contact baseline, when weighted) over connected pairs,
// proxemics over unconnected pairs, with per-frame connectivity masks for
// time-varying factors. Pair order follows character indices, so gradient
// accumulation is deterministic. Records are emitted for every qualifying
// pair and loss with value/grad zeroed outside the loss's window.
GraphLossResult sum_graph_losses(const MultiPersonMotion& multi,
                                 const graph::PairwiseInteractionGraph& g,
                                 const Skeleton& skeleton, const GuidanceLossConfig& cfg,
                                 int timestep);

}  // namespace gm::losses
