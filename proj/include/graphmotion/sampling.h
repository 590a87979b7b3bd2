#pragma once
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "graphmotion/diffusion.h"
#include "graphmotion/graph.h"
#include "graphmotion/report.h"
#include "graphmotion/types.h"

namespace gm::graph {

class DenoiserProvider {
 public:
  virtual ~DenoiserProvider() = default;
  virtual const diffusion::DenoiserInterface& for_factor(const Factor& factor) const = 0;
  // Used when the relaxation flag lets an uncovered character self-denoise.
  virtual const diffusion::DenoiserInterface& fallback() const = 0;
};

// Default denoiser from the config plus per-factor overrides keyed (from, to).
class ConfigDenoiserProvider : public DenoiserProvider {
 public:
  ConfigDenoiserProvider(const diffusion::SamplerConfig& config, const Skeleton& skeleton);
  const diffusion::DenoiserInterface& for_factor(const Factor& factor) const override;
  const diffusion::DenoiserInterface& fallback() const override;

 private:
  std::unique_ptr<diffusion::DenoiserInterface> default_;
  std::vector<std::tuple<std::string, std::string, std::unique_ptr<diffusion::DenoiserInterface>>>
      overrides_;
};

struct SampleResult {
  MultiPersonMotion motion;
  GuidanceReport report;
};

// Coupled reverse diffusion over the graph: per timestep, one prediction per
// active factor against the sources' pre-commit states, per-character
// averaging, one reverse step per character, guidance, then a synchronous
// commit. Scripted characters pass through unchanged.
SampleResult sample_multi(const PairwiseInteractionGraph& graph,
                          const DenoiserProvider& denoisers,
                          const diffusion::SamplerConfig& config, const Skeleton& skeleton);

// Two-person conditional generation: target denoised against a fixed clean
// source motion. Thin wrapper over sample_multi on the equivalent graph.
SampleResult conditional_sample(const std::string& target_id, const std::string& source_id,
                                const MotionSequence& source_motion,
                                const diffusion::SamplerConfig& config, const Skeleton& skeleton);

diffusion::SamplerConfig parse_sampler_config_json(const std::string& text);

}  // namespace gm::graph
