#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "graphmotion/denoisers.h"
#include "graphmotion/sampling.h"

namespace gm::graph {

ConfigDenoiserProvider::ConfigDenoiserProvider(const diffusion::SamplerConfig& config,
                                               const Skeleton& skeleton)
    : default_(denoisers::make_denoiser(config.denoiser, skeleton)) {
  for (const auto& o : config.factor_denoisers)
    overrides_.emplace_back(o.from, o.to, denoisers::make_denoiser(o.spec, skeleton));
}

const diffusion::DenoiserInterface& ConfigDenoiserProvider::for_factor(const Factor& f) const {
  for (const auto& [from, to, d] : overrides_)
    if (from == f.from && to == f.to) return *d;
  return *default_;
}

const diffusion::DenoiserInterface& ConfigDenoiserProvider::fallback() const { return *default_; }

namespace {

struct CharState {
  std::string id;
  bool scripted = false;
  MotionSequence x;  // current sample state, or the fixed motion if scripted
  std::unique_ptr<Rng> rng;  // null for scripted characters
};

// Maximal frame runs of a non-scripted character with no incoming factor.
std::vector<std::pair<int, int>> uncovered_runs(const PairwiseInteractionGraph& g,
                                                const std::string& id) {
  std::vector<std::pair<int, int>> runs;
  int start = -1;
  for (int f = 0; f <= g.frames; ++f) {
    bool covered = false;
    if (f < g.frames)
      for (const Factor& fac : g.factors)
        if (fac.to == id && fac.covers(f)) {
          covered = true;
          break;
        }
    if (!covered && f < g.frames) {
      if (start < 0) start = f;
    } else if (start >= 0) {
      runs.emplace_back(start, f);
      start = -1;
    }
  }
  return runs;
}

}  // namespace

SampleResult sample_multi(const PairwiseInteractionGraph& graph, const DenoiserProvider& denoisers,
                          const diffusion::SamplerConfig& config, const Skeleton& skeleton) {
  config.validate();
  require_valid(graph, config.allow_uncovered);
  const diffusion::NoiseSchedule schedule = config.make_schedule();
  const int L = graph.frames;
  const int J = skeleton.joint_count();

  int fps = 30;
  for (const auto& [id, m] : graph.scripted) {
    if (m.joints != J)
      throw ValidationError("scripted motion for " + id + " does not match the skeleton");
    fps = m.fps;
  }

  // per-character noise streams are independent of graph structure, so
  // relabeling characters and their seeds permutes outputs exactly
  std::vector<CharState> states;
  for (const std::string& id : graph.characters) {
    CharState s;
    s.id = id;
    if (const MotionSequence* m = graph.scripted_motion(id)) {
      s.scripted = true;
      s.x = *m;
    } else {
      s.rng = std::make_unique<Rng>(config.stream_seed(id));
      s.x = MotionSequence(L, J, fps);
      for (Vec3& p : s.x.data)
        for (int ax = 0; ax < 3; ++ax) p[ax] = s.rng->gaussian();
    }
    states.push_back(std::move(s));
  }

  std::vector<int> grid;
  if (config.mode == diffusion::Mode::ddpm) {
    grid.reserve(config.T + 1);
    for (int t = config.T; t >= 0; --t) grid.push_back(t);
  } else {
    grid = diffusion::ddim_timesteps(config.T, config.ddim_steps);
  }

  const bool any_guidance = config.guidance.gli_weight > 0 ||
                            config.guidance.proxemics_weight > 0 ||
                            config.guidance.contact_weight > 0;
  GuidanceReport report;

  for (size_t step = 0; step + 1 < grid.size(); ++step) {
    const int t_src = grid[step], t_dst = grid[step + 1];

    // phase 1: every active factor predicts its target's clean segment from
    // the sources' pre-commit states
    std::vector<MotionSequence> next(states.size());
    for (size_t c = 0; c < states.size(); ++c) {
      if (states[c].scripted) continue;
      std::vector<FactorPrediction> preds;
      for (size_t fi = 0; fi < graph.factors.size(); ++fi) {
        const Factor& fac = graph.factors[fi];
        if (fac.to != states[c].id) continue;
        const CharState* src = nullptr;
        for (const auto& s : states)
          if (s.id == fac.from) src = &s;
        const MotionSequence cond_slice = src->x.slice(fac.start, fac.end);
        diffusion::ConditionSpec cond;
        cond.other_motion = &cond_slice;
        cond.noisiness = fac.condition == Factor::Condition::clean
                             ? diffusion::ConditionSpec::Noisiness::clean
                             : diffusion::ConditionSpec::Noisiness::noisy_at_t;
        cond.text = fac.prompt.empty() ? graph.prompt : fac.prompt;
        cond.frame_window = {{fac.start, fac.end}};
        FactorPrediction p;
        p.factor_index = int(fi);
        p.target = states[c].id;
        p.start = fac.start;
        p.end = fac.end;
        p.segment = denoisers.for_factor(fac).predict_x0(states[c].x.slice(fac.start, fac.end),
                                                         t_src, &cond, schedule);
        preds.push_back(std::move(p));
      }
      for (const auto& [rs, re] : uncovered_runs(graph, states[c].id)) {
        // relaxation: self-denoise against an all-zero clean condition
        MotionSequence zero(re - rs, J, fps);
        diffusion::ConditionSpec cond;
        cond.other_motion = &zero;
        cond.noisiness = diffusion::ConditionSpec::Noisiness::clean;
        cond.text = graph.prompt;
        cond.frame_window = {{rs, re}};
        FactorPrediction p;
        p.target = states[c].id;
        p.start = rs;
        p.end = re;
        p.segment = denoisers.fallback().predict_x0(states[c].x.slice(rs, re), t_src, &cond,
                                                    schedule);
        preds.push_back(std::move(p));
      }
      const MotionSequence x0_hat = average_predictions(preds, L, J, fps);

      // phase 2: one reverse step per character
      if (config.mode == diffusion::Mode::ddpm)
        next[c] = diffusion::ddpm_step_from_x0(states[c].x, t_src, x0_hat, schedule,
                                               *states[c].rng, config.variance_zero);
      else
        next[c] = diffusion::ddim_step_from_x0(states[c].x, t_src, t_dst, x0_hat, schedule);
    }

    // phase 3: loss gradients nudge the stepped states
    if (any_guidance) {
      const double ab = schedule.abar(t_src);
      const double lambda_arg =
          (config.lambda_rule == diffusion::LambdaRule::constant ? 1.0 : ab) / std::sqrt(ab);
      for (int iter = 0; iter < config.guidance_iters; ++iter) {
        MultiPersonMotion multi;
        for (size_t c = 0; c < states.size(); ++c)
          multi.characters.emplace_back(states[c].id,
                                        states[c].scripted ? states[c].x : next[c]);
        losses::GraphLossResult lr =
            losses::sum_graph_losses(multi, graph, skeleton, config.guidance, t_src);
        if (iter == 0)
          for (GuidanceRecord& r : lr.records) report.add(std::move(r));
        for (size_t c = 0; c < states.size(); ++c) {
          if (states[c].scripted) continue;
          if (!diffusion::guided_update(next[c], lr.grads[c], lambda_arg))
            report.add({t_src, states[c].id, "", "nonfinite_skip", 0.0, 0.0, true});
        }
      }
    }

    // phase 4: synchronous commit
    for (size_t c = 0; c < states.size(); ++c) {
      if (states[c].scripted) continue;
      states[c].x = std::move(next[c]);
      if (!states[c].x.all_finite())
        throw NumericError("character " + states[c].id + " became non-finite at timestep " +
                           std::to_string(t_dst));
    }
  }

  SampleResult out;
  for (CharState& s : states) out.motion.characters.emplace_back(s.id, std::move(s.x));
  out.motion.validate();
  out.report = std::move(report);
  return out;
}

SampleResult conditional_sample(const std::string& target_id, const std::string& source_id,
                                const MotionSequence& source_motion,
                                const diffusion::SamplerConfig& config, const Skeleton& skeleton) {
  PairwiseInteractionGraph g;
  g.frames = source_motion.frames();
  g.characters = {source_id, target_id};
  Factor f;
  f.from = source_id;
  f.to = target_id;
  f.start = 0;
  f.end = g.frames;
  f.condition = Factor::Condition::clean;
  g.factors.push_back(f);
  g.scripted.emplace_back(source_id, source_motion);
  ConfigDenoiserProvider provider(config, skeleton);
  return sample_multi(g, provider, config, skeleton);
}

namespace {

using nlohmann::json;

losses::Window parse_window(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError(std::string(name) + " must be [lo, hi]");
  return losses::Window{j[0].get<int>(), j[1].get<int>()};
}

void parse_spec_fields(const json& j, diffusion::DenoiserSpec& spec) {
  if (j.contains("kind")) spec.kind = j.at("kind").get<std::string>();
  if (j.contains("mean")) spec.gaussian_mean = j.at("mean").get<double>();
  if (j.contains("stddev")) spec.gaussian_stddev = j.at("stddev").get<double>();
  if (j.contains("approach_gain")) spec.approach_gain = j.at("approach_gain").get<double>();
  if (j.contains("target_offset")) {
    const auto& v = j.at("target_offset");
    if (!v.is_array() || v.size() != 3)
      throw ValidationError("denoiser target_offset must be [x, y, z]");
    spec.target_offset = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
}

}  // namespace

diffusion::SamplerConfig parse_sampler_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config json parse error: ") + e.what());
  }
  diffusion::SamplerConfig c;
  try {
    const std::string mode = j.value("mode", std::string("ddpm"));
    if (mode == "ddpm")
      c.mode = diffusion::Mode::ddpm;
    else if (mode == "ddim")
      c.mode = diffusion::Mode::ddim;
    else
      throw ValidationError("mode must be ddpm or ddim, got " + mode);
    c.T = j.value("T", 1000);
    c.ddim_steps = j.value("ddim_steps", 50);
    c.beta_start = j.value("beta_start", 1e-4);
    c.beta_end = j.value("beta_end", 2e-2);
    c.seed = j.value("seed", std::uint64_t(0));
    c.guidance_iters = j.value("guidance_iters", 1);
    const std::string rule = j.value("lambda_rule", std::string("constant"));
    if (rule == "constant")
      c.lambda_rule = diffusion::LambdaRule::constant;
    else if (rule == "abar")
      c.lambda_rule = diffusion::LambdaRule::abar_scaled;
    else
      throw ValidationError("lambda_rule must be constant or abar, got " + rule);
    c.variance_zero = j.value("variance_zero", false);
    c.allow_uncovered = j.value("allow_uncovered", false);

    if (c.mode == diffusion::Mode::ddim) {
      // the strided grid visits few timesteps; default to always-on windows
      c.guidance.gli_window = {0, c.T + 1};
      c.guidance.proxemics_window = {0, c.T + 1};
      c.guidance.contact_window = {0, c.T + 1};
    }
    if (j.contains("guidance")) {
      const json& g = j.at("guidance");
      c.guidance.gli_weight = g.value("gli_weight", c.guidance.gli_weight);
      c.guidance.proxemics_weight = g.value("proxemics_weight", c.guidance.proxemics_weight);
      c.guidance.contact_weight = g.value("contact_weight", c.guidance.contact_weight);
      c.guidance.gli_threshold = g.value("gli_threshold", c.guidance.gli_threshold);
      c.guidance.aabb_padding = g.value("aabb_padding", c.guidance.aabb_padding);
      c.guidance.root_distance_min = g.value("root_distance_min", c.guidance.root_distance_min);
      c.guidance.tau = g.value("tau", c.guidance.tau);
      if (g.contains("gli_window")) c.guidance.gli_window = parse_window(g.at("gli_window"), "gli_window");
      if (g.contains("proxemics_window"))
        c.guidance.proxemics_window = parse_window(g.at("proxemics_window"), "proxemics_window");
      if (g.contains("contact_window"))
        c.guidance.contact_window = parse_window(g.at("contact_window"), "contact_window");
    }
    if (j.contains("denoiser")) parse_spec_fields(j.at("denoiser"), c.denoiser);
    for (const auto& jo : j.value("factor_denoisers", json::array())) {
      diffusion::FactorDenoiserOverride o;
      o.from = jo.at("from").get<std::string>();
      o.to = jo.at("to").get<std::string>();
      o.spec = c.denoiser;
      parse_spec_fields(jo, o.spec);
      c.factor_denoisers.push_back(std::move(o));
    }
    if (j.contains("character_seeds"))
      for (const auto& [id, s] : j.at("character_seeds").items())
        c.character_seeds.emplace_back(id, s.get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config json: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace gm::graph
