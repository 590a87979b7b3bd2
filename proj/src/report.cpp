#include "graphmotion/report.h"

#include <fstream>

#include "json.hpp"

#include "graphmotion/types.h"

namespace gm {

void GuidanceReport::write_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  for (const auto& r : records) {
    nlohmann::json j{{"t", r.timestep}, {"pair", {r.a, r.b}},      {"loss", r.loss},
                     {"value", r.value}, {"grad_norm", r.grad_norm}, {"active", r.window_active}};
    out << j.dump() << '\n';
  }
}

void RunManifest::write_json(const std::string& path) const {
  nlohmann::json j{{"config_hash", config_hash},
                   {"seed", seed},
                   {"mode", mode},
                   {"graph", graph_path},
                   {"outputs", outputs},
                   {"versions", {{"graphmotion", tool_version}, {"eigen", eigen_version}}},
                   {"wall_clock_seconds", wall_clock_seconds}};
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace gm
