#include "graphmotion/denoisers.h"

#include <cmath>

namespace gm::denoisers {

GaussianPriorDenoiser::GaussianPriorDenoiser(double mean, double stddev)
    : mean_(mean), stddev_(stddev) {
  if (!(stddev > 0)) throw ValidationError("gaussian denoiser stddev must be positive");
}

MotionSequence GaussianPriorDenoiser::predict_x0(const MotionSequence& x_t, int t,
                                                 const diffusion::ConditionSpec*,
                                                 const diffusion::NoiseSchedule& schedule) const {
  // E[x0 | x_t] for x0 ~ N(mean, stddev^2) per coordinate:
  // (sqrt(abar) s^2 x_t + (1 - abar) mean) / (abar s^2 + 1 - abar)
  const double ab = schedule.abar(t);
  const double s2 = stddev_ * stddev_;
  const double den = ab * s2 + (1.0 - ab);
  const double cx = std::sqrt(ab) * s2 / den;
  const double cm = (1.0 - ab) * mean_ / den;
  MotionSequence out = x_t;
  for (Vec3& p : out.data) p = cx * p + Vec3::Constant(cm);
  return out;
}

SyntheticInteractionDenoiser::SyntheticInteractionDenoiser(Vec3 target_offset,
                                                           double approach_gain,
                                                           std::vector<Vec3> base_pose)
    : target_offset_(std::move(target_offset)),
      approach_gain_(approach_gain),
      base_pose_(std::move(base_pose)) {
  if (!(approach_gain > 0) || approach_gain > 1)
    throw ValidationError("synthetic denoiser approach_gain must be in (0, 1]");
  if (base_pose_.empty()) throw ValidationError("synthetic denoiser needs a base pose");
}

MotionSequence SyntheticInteractionDenoiser::predict_x0(
    const MotionSequence& x_t, int t, const diffusion::ConditionSpec* condition,
    const diffusion::NoiseSchedule& schedule) const {
  if (x_t.joints != int(base_pose_.size()))
    throw ValidationError("synthetic denoiser: input joints do not match base pose");
  if (!condition || !condition->other_motion)
    throw ValidationError("synthetic denoiser requires a conditioning motion");
  const MotionSequence& cond = *condition->other_motion;
  if (cond.frames() != x_t.frames() || cond.joints != x_t.joints)
    throw ValidationError("synthetic denoiser: condition shape mismatch");

  // Noisy states live at scale sqrt(abar_t); divide it out so the implied
  // clean roots are compared in the same units.
  const double inv = 1.0 / std::sqrt(schedule.abar(t));
  const bool cond_noisy =
      condition->noisiness == diffusion::ConditionSpec::Noisiness::noisy_at_t;
  MotionSequence out(x_t.frames(), x_t.joints, x_t.fps);
  for (int f = 0; f < x_t.frames(); ++f) {
    const Vec3 own_root = x_t.at(f, 0) * inv;
    const Vec3 cond_root = cond.at(f, 0) * (cond_noisy ? inv : 1.0);
    const Vec3 root =
        (1.0 - approach_gain_) * own_root + approach_gain_ * (cond_root + target_offset_);
    const Vec3 shift = root - base_pose_[0];
    for (int j = 0; j < x_t.joints; ++j) out.at(f, j) = base_pose_[j] + shift;
  }
  return out;
}

std::unique_ptr<diffusion::DenoiserInterface> make_denoiser(const diffusion::DenoiserSpec& spec,
                                                            const Skeleton& skeleton) {
  if (spec.kind == "gaussian")
    return std::make_unique<GaussianPriorDenoiser>(spec.gaussian_mean, spec.gaussian_stddev);
  if (spec.kind == "synthetic") {
    if (skeleton.base_pose.empty())
      throw ValidationError("synthetic denoiser needs a skeleton base pose");
    return std::make_unique<SyntheticInteractionDenoiser>(spec.target_offset, spec.approach_gain,
                                                          skeleton.base_pose);
  }
  throw ValidationError("unknown denoiser kind " + spec.kind);
}

}  // namespace gm::denoisers
