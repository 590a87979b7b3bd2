#include "graphmotion/diffusion.h"

#include <cmath>

namespace gm::diffusion {

std::uint64_t SamplerConfig::stream_seed(const std::string& id) const {
  for (const auto& [cid, s] : character_seeds)
    if (cid == id) return s;
  return splitmix64(seed ^ fnv1a64(id));
}

namespace {
void validate_spec(const DenoiserSpec& spec) {
  if (spec.kind == "gaussian") {
    if (!(spec.gaussian_stddev > 0))
      throw ValidationError("gaussian denoiser stddev must be positive");
  } else if (spec.kind == "synthetic") {
    if (!(spec.approach_gain > 0) || spec.approach_gain > 1)
      throw ValidationError("synthetic denoiser approach_gain must be in (0, 1]");
    if (!spec.target_offset.allFinite())
      throw ValidationError("synthetic denoiser target_offset must be finite");
  } else {
    throw ValidationError("unknown denoiser kind " + spec.kind);
  }
}
}  // namespace

void SamplerConfig::validate() const {
  if (T < 1) throw ValidationError("sampler T must be >= 1");
  if (!(beta_start > 0) || !(beta_end < 1) || beta_end < beta_start)
    throw ValidationError("sampler betas must satisfy 0 < start <= end < 1");
  if (mode == Mode::ddim && (ddim_steps < 1 || ddim_steps > T))
    throw ValidationError("ddim_steps must be in [1, T]");
  if (guidance_iters < 1) throw ValidationError("guidance_iters must be >= 1");
  guidance.validate(T);
  validate_spec(denoiser);
  for (const auto& o : factor_denoisers) validate_spec(o.spec);
}

namespace {
void check_same_shape(const MotionSequence& a, const MotionSequence& b, const char* what) {
  if (a.frames() != b.frames() || a.joints != b.joints)
    throw ValidationError(std::string(what) + ": shape mismatch");
}
}  // namespace

MotionSequence forward_diffuse(const MotionSequence& x0, int t, const MotionSequence& noise,
                               const NoiseSchedule& schedule) {
  check_same_shape(x0, noise, "forward_diffuse");
  const double ab = schedule.abar(t);
  const double s0 = std::sqrt(ab), s1 = std::sqrt(1.0 - ab);
  MotionSequence out = x0;
  for (size_t k = 0; k < out.data.size(); ++k) out.data[k] = s0 * x0.data[k] + s1 * noise.data[k];
  return out;
}

MotionSequence posterior_mean(const MotionSequence& x0_hat, const MotionSequence& x_t, int t,
                              const NoiseSchedule& schedule) {
  check_same_shape(x0_hat, x_t, "posterior_mean");
  if (t == 0) return x0_hat;
  const double ab_t = schedule.abar(t), ab_p = schedule.abar(t - 1);
  const double beta_t = schedule.beta(t), alpha_t = schedule.alpha(t);
  const double c1 = std::sqrt(ab_p) * beta_t / (1.0 - ab_t);
  const double c2 = std::sqrt(alpha_t) * (1.0 - ab_p) / (1.0 - ab_t);
  MotionSequence out = x0_hat;
  for (size_t k = 0; k < out.data.size(); ++k)
    out.data[k] = c1 * x0_hat.data[k] + c2 * x_t.data[k];
  return out;
}

MotionSequence ddpm_step_from_x0(const MotionSequence& x_t, int t, const MotionSequence& x0_hat,
                                 const NoiseSchedule& schedule, Rng& rng, bool variance_zero) {
  if (t < 1) throw ValidationError("ddpm step needs t >= 1");
  MotionSequence out = posterior_mean(x0_hat, x_t, t, schedule);
  // reverse kernel is N(mu, (1 - alpha_t) I); the final step adds no noise
  if (t > 1 && !variance_zero) {
    const double sigma = std::sqrt(schedule.beta(t));
    for (Vec3& p : out.data)
      for (int ax = 0; ax < 3; ++ax) p[ax] += sigma * rng.gaussian();
  }
  return out;
}

MotionSequence ddpm_step(const MotionSequence& x_t, int t, const DenoiserInterface& denoiser,
                         const ConditionSpec* condition, const NoiseSchedule& schedule, Rng& rng,
                         bool variance_zero) {
  return ddpm_step_from_x0(x_t, t, denoiser.predict_x0(x_t, t, condition, schedule), schedule,
                           rng, variance_zero);
}

MotionSequence ddim_step_from_x0(const MotionSequence& x_t, int t, int t_prev,
                                 const MotionSequence& x0_hat, const NoiseSchedule& schedule) {
  if (t < 1 || t_prev < 0 || t_prev >= t)
    throw ValidationError("ddim step needs 0 <= t_prev < t, t >= 1");
  check_same_shape(x0_hat, x_t, "ddim_step");
  const double ab_t = schedule.abar(t), ab_p = schedule.abar(t_prev);
  const double eps_scale = 1.0 / std::sqrt(1.0 - ab_t);
  const double s0 = std::sqrt(ab_t), p0 = std::sqrt(ab_p), p1 = std::sqrt(1.0 - ab_p);
  MotionSequence out = x_t;
  for (size_t k = 0; k < out.data.size(); ++k) {
    const Vec3 eps_hat = (x_t.data[k] - s0 * x0_hat.data[k]) * eps_scale;
    out.data[k] = p0 * x0_hat.data[k] + p1 * eps_hat;
  }
  return out;
}

MotionSequence ddim_step(const MotionSequence& x_t, int t, int t_prev,
                         const DenoiserInterface& denoiser, const ConditionSpec* condition,
                         const NoiseSchedule& schedule) {
  return ddim_step_from_x0(x_t, t, t_prev, denoiser.predict_x0(x_t, t, condition, schedule),
                           schedule);
}

bool guided_update(MotionSequence& x, const std::vector<Vec3>& grad, double lambda_t) {
  if (grad.size() != x.data.size()) throw ValidationError("guided_update: gradient shape mismatch");
  if (lambda_t == 0.0) return true;
  for (const Vec3& g : grad)
    if (!g.allFinite()) return false;
  for (size_t k = 0; k < x.data.size(); ++k) x.data[k] -= lambda_t * grad[k];
  return true;
}

}  // namespace gm::diffusion
