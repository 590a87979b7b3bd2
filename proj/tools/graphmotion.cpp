#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "graphmotion/fixtures.h"
#include "graphmotion/gli.h"
#include "graphmotion/metrics.h"
#include "graphmotion/motion_io.h"
#include "graphmotion/rng.h"
#include "graphmotion/sampling.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gm::ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gm::ValidationError("cannot open " + path + " for writing");
  out << text;
}

std::string hash_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                (unsigned long long)gm::fnv1a64(std::string_view(bytes)));
  return buf;
}

struct SampleArgs {
  std::string config_path, graph_path, out_dir;
  std::string guidance = "on";  // on | off | proxemics-only | gli-only
  std::string mode;             // empty keeps the config's mode
  std::int64_t seed = -1;       // negative keeps the config's seed
};

int run_sample(const SampleArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string config_text = read_file(args.config_path);
  gm::diffusion::SamplerConfig config = gm::graph::parse_sampler_config_json(config_text);
  if (args.seed >= 0) config.seed = std::uint64_t(args.seed);
  if (args.mode == "ddpm")
    config.mode = gm::diffusion::Mode::ddpm;
  else if (args.mode == "ddim")
    config.mode = gm::diffusion::Mode::ddim;
  else if (!args.mode.empty())
    throw gm::ValidationError("--mode must be ddpm or ddim");
  if (args.guidance == "off") {
    config.guidance.gli_weight = 0;
    config.guidance.proxemics_weight = 0;
    config.guidance.contact_weight = 0;
  } else if (args.guidance == "proxemics-only") {
    config.guidance.gli_weight = 0;
    config.guidance.contact_weight = 0;
  } else if (args.guidance == "gli-only") {
    config.guidance.proxemics_weight = 0;
    config.guidance.contact_weight = 0;
  } else if (args.guidance != "on") {
    throw gm::ValidationError("--guidance must be on, off, proxemics-only or gli-only");
  }

  gm::graph::PairwiseInteractionGraph graph = gm::graph::load_graph_json(args.graph_path);
  const gm::Skeleton& skeleton = gm::default_skeleton();
  gm::graph::ConfigDenoiserProvider provider(config, skeleton);
  gm::graph::SampleResult result = gm::graph::sample_multi(graph, provider, config, skeleton);

  fs::create_directories(args.out_dir);
  gm::RunManifest manifest;
  manifest.config_hash = hash_hex(config_text);
  manifest.seed = config.seed;
  manifest.mode = config.mode == gm::diffusion::Mode::ddpm ? "ddpm" : "ddim";
  manifest.graph_path = args.graph_path;
  manifest.tool_version = kVersion;
  manifest.eigen_version = std::to_string(EIGEN_WORLD_VERSION) + "." +
                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION);

  json scene;
  scene["characters"] = json::array();
  for (const auto& [id, motion] : result.motion.characters) {
    const std::string fname = id + ".json";
    gm::io::save_motion_json((fs::path(args.out_dir) / fname).string(), motion, skeleton);
    scene["characters"].push_back({{"id", id}, {"motion", fname}});
    manifest.outputs.push_back(fname);
  }
  write_file((fs::path(args.out_dir) / "scene.json").string(), scene.dump(2));
  manifest.outputs.push_back("scene.json");
  result.report.write_jsonl((fs::path(args.out_dir) / "guidance.jsonl").string());
  manifest.outputs.push_back("guidance.jsonl");
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest.write_json((fs::path(args.out_dir) / "manifest.json").string());
  std::cout << "wrote " << result.motion.characters.size() << " characters to " << args.out_dir
            << "\n";
  return 0;
}

gm::MultiPersonMotion load_scene(const std::string& scene_path, gm::Skeleton* skeleton_out) {
  json scene;
  try {
    scene = json::parse(read_file(scene_path));
  } catch (const json::exception& e) {
    throw gm::ValidationError(scene_path + ": json parse error: " + e.what());
  }
  gm::MultiPersonMotion multi;
  const fs::path base = fs::path(scene_path).parent_path();
  bool have_skeleton = false;
  for (const auto& c : scene.at("characters")) {
    const std::string id = c.at("id").get<std::string>();
    fs::path mp(c.at("motion").get<std::string>());
    if (mp.is_relative()) mp = base / mp;
    gm::io::LoadedMotion lm = gm::io::load_motion(mp.string());
    if (!have_skeleton) {
      *skeleton_out = lm.skeleton;
      have_skeleton = true;
    } else if (lm.skeleton.joint_count() != skeleton_out->joint_count()) {
      throw gm::ValidationError("characters use different skeletons");
    }
    multi.characters.emplace_back(id, std::move(lm.motion));
  }
  if (!have_skeleton) throw gm::ValidationError(scene_path + ": scene has no characters");
  multi.validate();
  return multi;
}

int run_eval(const std::string& scene_path, const std::string& out_dir) {
  gm::Skeleton skeleton;
  gm::MultiPersonMotion multi = load_scene(scene_path, &skeleton);
  gm::metrics::MetricsReport report = gm::metrics::evaluate(multi, skeleton);
  if (out_dir.empty()) {
    std::cout << report.to_json() << "\n";
  } else {
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "metrics.json").string(), report.to_json() + "\n");
    write_file((fs::path(out_dir) / "penetration.csv").string(),
               gm::metrics::penetration_csv(multi, skeleton));
    std::cout << "wrote metrics.json and penetration.csv to " << out_dir << "\n";
  }
  return 0;
}

int run_gli(const std::string& a_path, const std::string& b_path, const std::string& out_path,
            double threshold) {
  gm::io::LoadedMotion a = gm::io::load_motion(a_path);
  gm::io::LoadedMotion b = gm::io::load_motion(b_path);
  if (a.skeleton.joint_count() != b.skeleton.joint_count())
    throw gm::ValidationError("motions use different skeletons");
  if (a.motion.frames() != b.motion.frames())
    throw gm::ValidationError("motions have different frame counts");
  const int L = a.motion.frames();
  std::ostringstream out;
  out << "frame,chain_i,chain_j,gli,flags\n";
  std::vector<gm::gli::GliMatrix> per_frame(L);
  for (int f = 0; f < L; ++f) {
    per_frame[f] = gm::gli::pose_pair_gli(a.motion.pose(f), b.motion.pose(f), a.skeleton);
    for (int ci = 0; ci < 5; ++ci)
      for (int cj = 0; cj < 5; ++cj) {
        const auto& flags = per_frame[f].flags[ci][cj];
        out << f << ',' << ci << ',' << cj << ',' << per_frame[f].value[ci][cj] << ','
            << (flags.degenerate ? "degenerate" : flags.singular ? "singular" : "ok") << '\n';
      }
  }
  // summary: worst frame-to-frame jump and count of |gli| > threshold frames
  for (int ci = 0; ci < 5; ++ci)
    for (int cj = 0; cj < 5; ++cj) {
      double max_jump = 0;
      int above = 0;
      for (int f = 0; f < L; ++f) {
        if (f > 0)
          max_jump = std::max(max_jump, std::abs(per_frame[f].value[ci][cj] -
                                                 per_frame[f - 1].value[ci][cj]));
        if (std::abs(per_frame[f].value[ci][cj]) > threshold) ++above;
      }
      out << "max_dgli," << ci << ',' << cj << ',' << max_jump << ',' << above << '\n';
    }
  if (out_path.empty())
    std::cout << out.str();
  else
    write_file(out_path, out.str());
  return 0;
}

int run_make_fixtures(const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  const gm::Skeleton path5 = gm::fixtures::path_skeleton(5);
  gm::io::save_motion_json((base / "hopf_a.json").string(), gm::fixtures::hopf_a(), path5);
  gm::io::save_motion_json((base / "hopf_b.json").string(), gm::fixtures::hopf_b(), path5);
  gm::io::save_motion_json((base / "windmill.json").string(), gm::fixtures::windmill_motion(),
                           gm::default_skeleton());
  gm::io::save_motion_json((base / "skating.json").string(), gm::fixtures::skating_motion(),
                           gm::default_skeleton());
  gm::io::save_motion_json((base / "stand_still.json").string(),
                           gm::fixtures::base_translated(gm::Vec3(0, 1, 0), 64),
                           gm::default_skeleton());

  json graph;
  graph["frames"] = 64;
  graph["prompt"] = "one defender reacts to two approaching attackers";
  graph["characters"] = {"defender", "attacker1", "attacker2"};
  graph["factors"] = json::array();
  graph["factors"].push_back({{"from", "defender"}, {"to", "attacker1"}});
  graph["factors"].push_back({{"from", "attacker1"}, {"to", "defender"}});
  graph["factors"].push_back({{"from", "defender"}, {"to", "attacker2"}});
  graph["factors"].push_back({{"from", "attacker2"}, {"to", "defender"}});
  write_file((base / "two_on_one_graph.json").string(), graph.dump(2));

  json config;
  config["mode"] = "ddpm";
  config["T"] = 1000;
  config["seed"] = 7;
  config["denoiser"] = {{"kind", "synthetic"}, {"approach_gain", 0.5}};
  config["factor_denoisers"] = json::array();
  config["factor_denoisers"].push_back(
      {{"from", "defender"}, {"to", "attacker1"}, {"target_offset", {-0.25, 0.0, 1.0}}});
  config["factor_denoisers"].push_back(
      {{"from", "attacker1"}, {"to", "defender"}, {"target_offset", {0.25, 0.0, -1.0}}});
  config["factor_denoisers"].push_back(
      {{"from", "defender"}, {"to", "attacker2"}, {"target_offset", {0.25, 0.0, 1.0}}});
  config["factor_denoisers"].push_back(
      {{"from", "attacker2"}, {"to", "defender"}, {"target_offset", {-0.25, 0.0, -1.0}}});
  config["guidance"] = {{"proxemics_weight", 0.2},
                        {"gli_weight", 0.5},
                        {"root_distance_min", 1.5},
                        {"gli_threshold", 0.4}};
  write_file((base / "two_on_one_config.json").string(), config.dump(2));

  write_file((base / "README.md").string(), R"md(# Fixture files

Small inputs for exercising the sampler, the entanglement analyzer and the
metrics from the command line.

- `hopf_a.json`, `hopf_b.json`: two closed square loops on a 5 joint path
  skeleton (the fifth joint repeats the first, closing the polygon). The
  loops pass through each other like adjacent chain links, so the summed
  chain entanglement between them is exactly +1 or -1; translating either
  loop far away drops it to 0. Try
  `graphmotion gli --a hopf_a.json --b hopf_b.json`.

- `windmill.json`: a standing figure whose right arm sweeps two full circles
  around the shoulder over 24 frames. Conditioning a sampled partner on this
  motion makes arm-body entanglement jumps easy to provoke.

- `skating.json`: a figure translating 3 cm per frame with feet held 3 cm
  above the ground. Every transition violates the foot-contact rule, so the
  skating ratio evaluates to exactly 1.0.

- `stand_still.json`: the rest pose held for 64 frames, for use as a scripted
  conditioning character.

- `two_on_one_graph.json`, `two_on_one_config.json`: a three character scene
  where two attackers close in on one defender. Offsets are expressed in the
  conditioning character's frame, so each directed factor carries its own
  target offset. Run
  `graphmotion sample --graph two_on_one_graph.json --config two_on_one_config.json --out out/`.
)md");
  std::cout << "wrote fixtures to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-person interaction sampling and evaluation"};
  app.require_subcommand(1);

  SampleArgs sargs;
  CLI::App* sample = app.add_subcommand("sample", "sample a scene over an interaction graph");
  sample->add_option("--config", sargs.config_path, "sampler config json")->required();
  sample->add_option("--graph", sargs.graph_path, "interaction graph json")->required();
  sample->add_option("--out", sargs.out_dir, "output directory")->required();
  sample->add_option("--seed", sargs.seed, "override the config seed");
  sample->add_option("--guidance", sargs.guidance, "on | off | proxemics-only | gli-only");
  sample->add_option("--mode", sargs.mode, "override the config mode (ddpm | ddim)");

  std::string scene_path, eval_out;
  CLI::App* eval = app.add_subcommand("eval", "compute interaction metrics for a scene");
  eval->add_option("--scene", scene_path, "scene.json from a sample run")->required();
  eval->add_option("--out", eval_out, "output directory (stdout when omitted)");

  std::string gli_a, gli_b, gli_out;
  double gli_threshold = 0.4;
  CLI::App* gli_cmd = app.add_subcommand("gli", "per-frame chain entanglement between two motions");
  gli_cmd->add_option("--a", gli_a, "first motion file")->required();
  gli_cmd->add_option("--b", gli_b, "second motion file")->required();
  gli_cmd->add_option("--out", gli_out, "csv path (stdout when omitted)");
  gli_cmd->add_option("--threshold", gli_threshold, "|gli| level counted in the summary");

  std::string fixtures_out;
  CLI::App* mk = app.add_subcommand("make-fixtures", "write example inputs");
  mk->add_option("--out", fixtures_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (*sample) return run_sample(sargs);
    if (*eval) return run_eval(scene_path, eval_out);
    if (*gli_cmd) return run_gli(gli_a, gli_b, gli_out, gli_threshold);
    if (*mk) return run_make_fixtures(fixtures_out);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const gm::NumericError& e) {
    std::cerr << json{{"error", "numeric"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  } catch (const gm::ValidationError& e) {
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
}
