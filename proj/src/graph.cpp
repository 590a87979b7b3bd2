#include "graphmotion/graph.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graphmotion/motion_io.h"

namespace gm::graph {

int PairwiseInteractionGraph::character_index(const std::string& id) const {
  for (size_t i = 0; i < characters.size(); ++i)
    if (characters[i] == id) return int(i);
  return -1;
}

bool PairwiseInteractionGraph::is_scripted(const std::string& id) const {
  return scripted_motion(id) != nullptr;
}

const MotionSequence* PairwiseInteractionGraph::scripted_motion(const std::string& id) const {
  for (const auto& [cid, m] : scripted)
    if (cid == id) return &m;
  return nullptr;
}

std::vector<Violation> validate_graph(const PairwiseInteractionGraph& g, bool allow_uncovered) {
  std::vector<Violation> out;
  auto fatal = [&](std::string msg) { out.push_back({true, std::move(msg)}); };
  auto warn = [&](std::string msg) { out.push_back({false, std::move(msg)}); };

  if (g.frames <= 0) fatal("graph frame count must be positive");
  if (g.characters.empty()) fatal("graph has no characters");

  std::set<std::string> ids;
  for (const auto& id : g.characters)
    if (!ids.insert(id).second) fatal("duplicate character id " + id);

  std::set<std::string> scripted_ids;
  for (const auto& [id, m] : g.scripted) {
    if (!ids.count(id)) fatal("scripted motion for unknown character " + id);
    if (!scripted_ids.insert(id).second) fatal("duplicate scripted motion for " + id);
    if (m.frames() != g.frames)
      fatal("scripted motion for " + id + " has " + std::to_string(m.frames()) +
            " frames, graph has " + std::to_string(g.frames));
    if (!g.scripted.empty() && m.joints != g.scripted.front().second.joints)
      fatal("scripted motions disagree on joint count");
  }

  for (size_t i = 0; i < g.factors.size(); ++i) {
    const Factor& f = g.factors[i];
    const std::string tag = "factor " + std::to_string(i) + " (" + f.from + " -> " + f.to + ")";
    if (!ids.count(f.from)) fatal(tag + ": unknown source " + f.from);
    if (!ids.count(f.to)) fatal(tag + ": unknown target " + f.to);
    if (f.from == f.to) fatal(tag + ": self loop");
    if (f.start < 0 || f.end > g.frames || f.start >= f.end)
      fatal(tag + ": window [" + std::to_string(f.start) + "," + std::to_string(f.end) +
            ") invalid for " + std::to_string(g.frames) + " frames");
    if (f.condition == Factor::Condition::clean && !scripted_ids.count(f.from))
      fatal(tag + ": clean condition but source has no scripted motion");
    if (f.condition == Factor::Condition::noisy && scripted_ids.count(f.from))
      fatal(tag + ": noisy condition from a scripted character");
    if (scripted_ids.count(f.to)) warn(tag + ": target is scripted, prediction is discarded");
  }

  // coverage: every non-scripted character must be some factor's target each frame
  for (const auto& id : g.characters) {
    if (scripted_ids.count(id)) continue;
    int run_start = -1;
    for (int fr = 0; fr <= g.frames; ++fr) {
      bool covered = false;
      if (fr < g.frames)
        for (const Factor& f : g.factors)
          if (f.to == id && f.covers(fr)) {
            covered = true;
            break;
          }
      if (!covered && fr < g.frames) {
        if (run_start < 0) run_start = fr;
      } else if (run_start >= 0) {
        std::string msg = "character " + id + " has no incoming factor over frames [" +
                          std::to_string(run_start) + "," + std::to_string(fr) + ")";
        if (allow_uncovered)
          warn(msg + "; it self-denoises there");
        else
          fatal(msg);
        run_start = -1;
      }
    }
  }

  // undirected reachability over factor edges
  if (g.characters.size() > 1 && !g.factors.empty()) {
    std::map<std::string, int> comp;
    for (const auto& id : g.characters) comp[id] = -1;
    int n_comp = 0;
    for (const auto& seed : g.characters) {
      if (comp[seed] >= 0) continue;
      std::vector<std::string> stack{seed};
      comp[seed] = n_comp;
      while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        for (const Factor& f : g.factors) {
          std::string other;
          if (f.from == cur)
            other = f.to;
          else if (f.to == cur)
            other = f.from;
          else
            continue;
          if (comp.count(other) && comp[other] < 0) {
            comp[other] = n_comp;
            stack.push_back(other);
          }
        }
      }
      ++n_comp;
    }
    if (n_comp > 1)
      warn("graph splits into " + std::to_string(n_comp) +
           " disconnected groups; groups never see each other");
  }

  return out;
}

void require_valid(const PairwiseInteractionGraph& g, bool allow_uncovered) {
  std::string msg;
  for (const Violation& v : validate_graph(g, allow_uncovered))
    if (v.fatal) msg += (msg.empty() ? "" : "; ") + v.message;
  if (!msg.empty()) throw ValidationError("invalid interaction graph: " + msg);
}

std::vector<const Factor*> incoming_factors(const PairwiseInteractionGraph& g,
                                            const std::string& character, int frame) {
  std::vector<const Factor*> out;
  for (const Factor& f : g.factors)
    if (f.to == character && f.covers(frame)) out.push_back(&f);
  return out;
}

MotionSequence average_predictions(const std::vector<FactorPrediction>& preds, int total_frames,
                                   int joints, int fps) {
  MotionSequence out(total_frames, joints, fps);
  std::vector<int> count(total_frames, 0);
  for (const FactorPrediction& p : preds) {
    if (p.segment.joints != joints || p.segment.frames() != p.end - p.start)
      throw ValidationError("prediction segment shape mismatch for " + p.target);
    for (int f = p.start; f < p.end; ++f) {
      for (int j = 0; j < joints; ++j) out.at(f, j) += p.segment.at(f - p.start, j);
      ++count[f];
    }
  }
  for (int f = 0; f < total_frames; ++f)
    if (count[f] > 1)
      for (int j = 0; j < joints; ++j) out.at(f, j) /= count[f];
  return out;
}

std::vector<char> pair_connectivity(const PairwiseInteractionGraph& g, const std::string& a,
                                    const std::string& b) {
  std::vector<char> mask(g.frames, 0);
  for (const Factor& f : g.factors)
    if ((f.from == a && f.to == b) || (f.from == b && f.to == a))
      for (int fr = std::max(f.start, 0); fr < std::min(f.end, g.frames); ++fr) mask[fr] = 1;
  return mask;
}

std::vector<std::pair<std::string, std::string>> unconnected_pairs(
    const PairwiseInteractionGraph& g) {
  std::vector<std::pair<std::string, std::string>> out;
  for (size_t i = 0; i < g.characters.size(); ++i)
    for (size_t j = i + 1; j < g.characters.size(); ++j) {
      bool any = false;
      for (const Factor& f : g.factors)
        if ((f.from == g.characters[i] && f.to == g.characters[j]) ||
            (f.from == g.characters[j] && f.to == g.characters[i])) {
          any = true;
          break;
        }
      if (!any) out.emplace_back(g.characters[i], g.characters[j]);
    }
  return out;
}

std::vector<UnconnectedWindow> unconnected_windows(const PairwiseInteractionGraph& g) {
  std::vector<UnconnectedWindow> out;
  for (size_t i = 0; i < g.characters.size(); ++i)
    for (size_t j = i + 1; j < g.characters.size(); ++j) {
      auto mask = pair_connectivity(g, g.characters[i], g.characters[j]);
      int run = -1;
      for (int f = 0; f <= g.frames; ++f) {
        bool off = f < g.frames && !mask[f];
        if (off && run < 0) run = f;
        if (!off && run >= 0) {
          out.push_back({g.characters[i], g.characters[j], run, f});
          run = -1;
        }
      }
    }
  return out;
}

PairwiseInteractionGraph parse_graph_json(const std::string& text, const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("graph json parse error: ") + e.what());
  }
  PairwiseInteractionGraph g;
  try {
    g.frames = j.at("frames").get<int>();
    g.prompt = j.value("prompt", std::string());
    g.characters = j.at("characters").get<std::vector<std::string>>();
    std::map<std::string, std::string> clean_paths;
    for (const auto& jf : j.value("factors", nlohmann::json::array())) {
      Factor f;
      f.from = jf.at("from").get<std::string>();
      f.to = jf.at("to").get<std::string>();
      if (jf.contains("frames")) {
        const auto& w = jf.at("frames");
        if (!w.is_array() || w.size() != 2)
          throw ValidationError("factor frames must be [start, end]");
        f.start = w[0].get<int>();
        f.end = w[1].get<int>();
      } else {
        f.start = 0;
        f.end = g.frames;
      }
      f.prompt = jf.value("prompt", std::string());
      const std::string cond = jf.value("condition", std::string("noisy"));
      if (cond == "noisy")
        f.condition = Factor::Condition::noisy;
      else if (cond == "clean")
        f.condition = Factor::Condition::clean;
      else
        throw ValidationError("factor condition must be noisy or clean, got " + cond);
      if (jf.contains("clean_motion")) {
        if (f.condition != Factor::Condition::clean)
          throw ValidationError("clean_motion given on a noisy factor " + f.from + " -> " + f.to);
        f.clean_motion_path = jf.at("clean_motion").get<std::string>();
        auto [it, inserted] = clean_paths.emplace(f.from, f.clean_motion_path);
        if (!inserted && it->second != f.clean_motion_path)
          throw ValidationError("character " + f.from + " has conflicting clean motions " +
                                it->second + " and " + f.clean_motion_path);
      }
      g.factors.push_back(std::move(f));
    }
    for (const auto& [id, rel] : clean_paths) {
      std::filesystem::path p(rel);
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      g.scripted.emplace_back(id, io::load_motion(p.string()).motion);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("graph json: ") + e.what());
  }
  return g;
}

PairwiseInteractionGraph load_graph_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace gm::graph
