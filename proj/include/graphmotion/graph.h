#pragma once
#include <string>
#include <utility>
#include <vector>

#include "graphmotion/types.h"

namespace gm::graph {

// Directed conditional-dependency edge: "to" is denoised conditioned on
// "from" over the half-open frame window [start, end).
struct Factor {
  std::string from, to;
  int start = 0, end = 0;
  std::string prompt;  // empty means the scene prompt
  enum class Condition { noisy, clean } condition = Condition::noisy;
  std::string clean_motion_path;

  bool covers(int frame) const { return frame >= start && frame < end; }
};

// Characters appearing as clean-mode sources are scripted: their motion is
// given, they take no denoising steps, and coverage rules do not apply to them.
struct PairwiseInteractionGraph {
  int frames = 0;
  std::string prompt;
  std::vector<std::string> characters;
  std::vector<Factor> factors;
  std::vector<std::pair<std::string, MotionSequence>> scripted;

  int character_index(const std::string& id) const;
  bool is_scripted(const std::string& id) const;
  const MotionSequence* scripted_motion(const std::string& id) const;
};

struct Violation {
  bool fatal = false;
  std::string message;
};

// Pure report; fatal entries would make sampling ill-defined.
std::vector<Violation> validate_graph(const PairwiseInteractionGraph& g,
                                      bool allow_uncovered = false);

// Throws ValidationError listing every fatal violation.
void require_valid(const PairwiseInteractionGraph& g, bool allow_uncovered = false);

std::vector<const Factor*> incoming_factors(const PairwiseInteractionGraph& g,
                                            const std::string& character, int frame);

struct FactorPrediction {
  int factor_index = -1;
  std::string target;
  int start = 0, end = 0;  // [start, end)
  MotionSequence segment;  // end - start frames
};

// Per-frame arithmetic mean over the predictions covering that frame.
MotionSequence average_predictions(const std::vector<FactorPrediction>& preds,
                                   int total_frames, int joints, int fps);

// connected[f] is true when any factor in either direction covers frame f.
std::vector<char> pair_connectivity(const PairwiseInteractionGraph& g, const std::string& a,
                                    const std::string& b);

// Unordered pairs with no factor in either direction anywhere.
std::vector<std::pair<std::string, std::string>> unconnected_pairs(
    const PairwiseInteractionGraph& g);

struct UnconnectedWindow {
  std::string a, b;
  int start = 0, end = 0;
};

// Maximal frame windows during which a pair has no covering factor.
std::vector<UnconnectedWindow> unconnected_windows(const PairwiseInteractionGraph& g);

PairwiseInteractionGraph parse_graph_json(const std::string& text, const std::string& base_dir);
PairwiseInteractionGraph load_graph_json(const std::string& path);

}  // namespace gm::graph
