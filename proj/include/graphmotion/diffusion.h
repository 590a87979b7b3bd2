#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphmotion/losses.h"
#include "graphmotion/rng.h"
#include "graphmotion/schedule.h"
#include "graphmotion/types.h"

namespace gm::diffusion {

struct ConditionSpec {
  const MotionSequence* other_motion = nullptr;
  enum class Noisiness { noisy_at_t, clean } noisiness = Noisiness::clean;
  std::string text;
  std::optional<std::pair<int, int>> frame_window;  // [start, end)
};

// Denoiser contract: deterministic, output shape equals input shape.
struct DenoiserInterface {
  virtual ~DenoiserInterface() = default;
  virtual MotionSequence predict_x0(const MotionSequence& x_t, int t,
                                    const ConditionSpec* condition,
                                    const NoiseSchedule& schedule) const = 0;
};

enum class Mode { ddpm, ddim };
enum class LambdaRule { constant, abar_scaled };

struct DenoiserSpec {
  std::string kind = "synthetic";  // "gaussian" | "synthetic"
  double gaussian_mean = 0.0;
  double gaussian_stddev = 1.0;
  Vec3 target_offset = Vec3::Zero();
  double approach_gain = 0.5;  // fraction of the way toward condition + offset
};

struct FactorDenoiserOverride {
  std::string from, to;
  DenoiserSpec spec;
};

struct SamplerConfig {
  int T = 1000;
  double beta_start = 1e-4, beta_end = 2e-2;
  Mode mode = Mode::ddpm;
  int ddim_steps = 50;
  losses::GuidanceLossConfig guidance;
  int guidance_iters = 1;
  LambdaRule lambda_rule = LambdaRule::constant;
  std::uint64_t seed = 0;
  bool variance_zero = false;   // debug: suppress reverse-step noise
  bool allow_uncovered = false; // uncovered characters self-denoise, flagged
  DenoiserSpec denoiser;
  std::vector<FactorDenoiserOverride> factor_denoisers;
  // Explicit per-character streams; anything absent derives from seed and id.
  std::vector<std::pair<std::string, std::uint64_t>> character_seeds;

  NoiseSchedule make_schedule() const { return NoiseSchedule::linear(T, beta_start, beta_end); }
  std::uint64_t stream_seed(const std::string& id) const;
  void validate() const;  // throws ValidationError
};

// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) noise
MotionSequence forward_diffuse(const MotionSequence& x0, int t, const MotionSequence& noise,
                               const NoiseSchedule& schedule);

// mu = c1 x0_hat + c2 x_t with c1 = sqrt(abar_{t-1}) beta_t / (1 - abar_t),
// c2 = sqrt(alpha_t)(1 - abar_{t-1}) / (1 - abar_t); t == 0 returns x0_hat.
MotionSequence posterior_mean(const MotionSequence& x0_hat, const MotionSequence& x_t, int t,
                              const NoiseSchedule& schedule);

MotionSequence ddpm_step_from_x0(const MotionSequence& x_t, int t, const MotionSequence& x0_hat,
                                 const NoiseSchedule& schedule, Rng& rng,
                                 bool variance_zero = false);
MotionSequence ddpm_step(const MotionSequence& x_t, int t, const DenoiserInterface& denoiser,
                         const ConditionSpec* condition, const NoiseSchedule& schedule, Rng& rng,
                         bool variance_zero = false);

// Deterministic update
// x_{t_prev} = sqrt(abar_p) x0_hat + sqrt(1-abar_p) (x_t - sqrt(abar_t) x0_hat)/sqrt(1-abar_t)
MotionSequence ddim_step_from_x0(const MotionSequence& x_t, int t, int t_prev,
                                 const MotionSequence& x0_hat, const NoiseSchedule& schedule);
MotionSequence ddim_step(const MotionSequence& x_t, int t, int t_prev,
                         const DenoiserInterface& denoiser, const ConditionSpec* condition,
                         const NoiseSchedule& schedule);

// x -= lambda_t * grad, in place. lambda_t == 0 leaves x bit-identical.
// A non-finite gradient leaves x untouched and returns false.
bool guided_update(MotionSequence& x, const std::vector<Vec3>& grad, double lambda_t);

}  // namespace gm::diffusion
