#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace gm {

// One guidance evaluation: pair {a,b} at a source timestep, for one loss.
// Records are emitted at every guided step; outside the loss's activation
// window value and grad_norm are 0 and window_active is false.
struct GuidanceRecord {
  int timestep = 0;
  std::string a, b;
  std::string loss;  // "gli" | "proxemics" | "contact" | "nonfinite_skip"
  double value = 0.0;
  double grad_norm = 0.0;
  bool window_active = false;
};

struct GuidanceReport {
  std::vector<GuidanceRecord> records;
  void add(GuidanceRecord r) { records.push_back(std::move(r)); }
  void write_jsonl(const std::string& path) const;
};

struct RunManifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string mode;
  std::string graph_path;
  std::vector<std::string> outputs;
  std::string tool_version;
  std::string eigen_version;
  double wall_clock_seconds = 0.0;
  void write_json(const std::string& path) const;
};

}  // namespace gm
