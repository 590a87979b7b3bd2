#pragma once
#include <memory>
#include <vector>

#include "graphmotion/diffusion.h"
#include "graphmotion/types.h"

namespace gm::denoisers {

// Exact posterior mean of a per-coordinate N(mean, stddev^2) prior under the
// forward process; ignores the condition. Oracle for the sampling machinery.
class GaussianPriorDenoiser : public diffusion::DenoiserInterface {
 public:
  GaussianPriorDenoiser(double mean, double stddev);
  MotionSequence predict_x0(const MotionSequence& x_t, int t,
                            const diffusion::ConditionSpec* condition,
                            const diffusion::NoiseSchedule& schedule) const override;

 private:
  double mean_, stddev_;
};

// Rigidly translates the base pose per frame so the root lands a fraction
// approach_gain of the way from the implied own root toward
// condition root + target_offset. Affine in (x_t, condition), so coupled
// fixed points are solvable by hand.
class SyntheticInteractionDenoiser : public diffusion::DenoiserInterface {
 public:
  SyntheticInteractionDenoiser(Vec3 target_offset, double approach_gain,
                               std::vector<Vec3> base_pose);
  MotionSequence predict_x0(const MotionSequence& x_t, int t,
                            const diffusion::ConditionSpec* condition,
                            const diffusion::NoiseSchedule& schedule) const override;

 private:
  Vec3 target_offset_;
  double approach_gain_;
  std::vector<Vec3> base_pose_;
};

std::unique_ptr<diffusion::DenoiserInterface> make_denoiser(const diffusion::DenoiserSpec& spec,
                                                            const Skeleton& skeleton);

}  // namespace gm::denoisers
