#pragma once
#include <vector>

#include "graphmotion/types.h"

namespace gm::diffusion {

// Discrete noise schedule, timesteps t in [0, T] with abar(0) == 1 so the
// final reverse step is exact.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> betas_;  // betas_[t-1] = beta_t, t in 1..T
  std::vector<double> abars_;  // abars_[t], t in 0..T

  static NoiseSchedule linear(int T, double beta_start = 1e-4, double beta_end = 2e-2) {
    if (T < 1) throw ValidationError("schedule: T must be >= 1");
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_end < beta_start)
      throw ValidationError("schedule: betas must satisfy 0 < start <= end < 1");
    NoiseSchedule s;
    s.T = T;
    s.betas_.resize(T);
    s.abars_.resize(T + 1);
    s.abars_[0] = 1.0;
    for (int t = 1; t <= T; ++t) {
      const double f = T == 1 ? 0.0 : double(t - 1) / (T - 1);
      s.betas_[t - 1] = beta_start + (beta_end - beta_start) * f;
      s.abars_[t] = s.abars_[t - 1] * (1.0 - s.betas_[t - 1]);
    }
    return s;
  }

  double beta(int t) const {
    if (t < 1 || t > T) throw ValidationError("schedule: beta(t) needs t in [1,T]");
    return betas_[t - 1];
  }
  double alpha(int t) const { return 1.0 - beta(t); }
  double abar(int t) const {
    if (t < 0 || t > T) throw ValidationError("schedule: abar(t) needs t in [0,T]");
    return abars_[t];
  }
};

// Strided deterministic-sampler grid, descending, always ending at 0.
// T=1000, steps=50 gives {1000, 980, ..., 20, 0}: 50 transitions.
inline std::vector<int> ddim_timesteps(int T, int steps) {
  if (steps < 1 || steps > T) throw ValidationError("ddim_timesteps: steps must be in [1,T]");
  std::vector<int> ts;
  ts.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    int t = T - int((long long)k * T / steps);
    if (!ts.empty() && t >= ts.back()) throw ValidationError("ddim_timesteps: grid not strictly decreasing");
    ts.push_back(t);
  }
  return ts;
}

}  // namespace gm::diffusion
