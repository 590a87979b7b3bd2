#include "graphmotion/metrics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace gm::metrics {

namespace {

// per-frame sum of capsule penetration depths and count of penetrating
// bone pairs between two characters
void frame_depths(std::span<const Vec3> pa, std::span<const Vec3> pb,
                  const std::vector<std::pair<int, int>>& bones, double radius, double* depth_sum,
                  int* pair_count) {
  *depth_sum = 0;
  *pair_count = 0;
  for (const auto& [i0, i1] : bones)
    for (const auto& [j0, j1] : bones) {
      const double d = segment_distance(pa[i0], pa[i1], pb[j0], pb[j1]);
      const double depth = 2.0 * radius - d;
      if (depth > 0) {
        *depth_sum += depth;
        ++*pair_count;
      }
    }
}

void check_multi(const MultiPersonMotion& multi, const Skeleton& skeleton) {
  multi.validate();
  for (const auto& [id, m] : multi.characters)
    if (m.joints != skeleton.joint_count())
      throw ValidationError("character " + id + " does not match the skeleton");
}

}  // namespace

double pair_pene_bone(const MotionSequence& a, const MotionSequence& b, const Skeleton& skeleton,
                      double radius) {
  if (a.frames() != b.frames()) throw ValidationError("frame count mismatch");
  const auto bones = skeleton.bones();
  const int L = a.frames();
  double total = 0;
  for (int f = 0; f < L; ++f) {
    double depth;
    int count;
    frame_depths(a.pose(f), b.pose(f), bones, radius, &depth, &count);
    total += depth;
  }
  return L ? total / L : 0.0;
}

double pene_bone(const MultiPersonMotion& multi, const Skeleton& skeleton, double radius) {
  check_multi(multi, skeleton);
  double total = 0;
  for (size_t i = 0; i < multi.characters.size(); ++i)
    for (size_t j = i + 1; j < multi.characters.size(); ++j)
      total += pair_pene_bone(multi.characters[i].second, multi.characters[j].second, skeleton,
                              radius);
  return total;
}

std::pair<double, double> contact_and_cframe(const MultiPersonMotion& multi,
                                             const Skeleton& skeleton, double radius) {
  check_multi(multi, skeleton);
  if (multi.characters.empty()) return {0.0, 0.0};
  const auto bones = skeleton.bones();
  const int L = multi.characters.front().second.frames();
  if (L == 0) return {0.0, 0.0};
  double count_sum = 0;
  int frames_hit = 0;
  for (int f = 0; f < L; ++f) {
    int frame_count = 0;
    for (size_t i = 0; i < multi.characters.size(); ++i)
      for (size_t j = i + 1; j < multi.characters.size(); ++j) {
        double depth;
        int count;
        frame_depths(multi.characters[i].second.pose(f), multi.characters[j].second.pose(f),
                     bones, radius, &depth, &count);
        frame_count += count;
      }
    count_sum += frame_count;
    if (frame_count > 0) ++frames_hit;
  }
  return {count_sum / L, 100.0 * frames_hit / L};
}

double skating_ratio(const MotionSequence& motion, const Skeleton& skeleton) {
  const int L = motion.frames();
  if (skeleton.foot_joints.empty() || L < 2) return 0.0;
  int skating = 0;
  for (int f = 0; f + 1 < L; ++f) {
    bool slid = false;
    for (int joint : skeleton.foot_joints) {
      const Vec3 &p0 = motion.at(f, joint), &p1 = motion.at(f + 1, joint);
      if (p0.y() >= 0.05 || p1.y() >= 0.05) continue;  // airborne or standing tall
      const double dx = p1.x() - p0.x(), dz = p1.z() - p0.z();
      if (std::sqrt(dx * dx + dz * dz) > 0.025) {
        slid = true;
        break;
      }
    }
    if (slid) ++skating;
  }
  return double(skating) / (L - 1);
}

double jitter(const MotionSequence& motion) {
  const int L = motion.frames();
  if (L < 4) throw ValidationError("jitter needs at least 4 frames");
  const double scale = double(motion.fps) * motion.fps * motion.fps;
  double sum = 0;
  long n = 0;
  for (int f = 0; f + 3 < L; ++f)
    for (int j = 0; j < motion.joints; ++j) {
      const Vec3 d3 =
          motion.at(f + 3, j) - 3.0 * motion.at(f + 2, j) + 3.0 * motion.at(f + 1, j) -
          motion.at(f, j);
      sum += d3.norm() * scale;
      ++n;
    }
  return sum / n;
}

MetricsReport evaluate(const MultiPersonMotion& multi, const Skeleton& skeleton, double radius) {
  check_multi(multi, skeleton);
  MetricsReport rep;
  const auto bones = skeleton.bones();
  for (size_t i = 0; i < multi.characters.size(); ++i)
    for (size_t j = i + 1; j < multi.characters.size(); ++j) {
      const auto& [ida, ma] = multi.characters[i];
      const auto& [idb, mb] = multi.characters[j];
      PairPenetration pp;
      pp.a = ida;
      pp.b = idb;
      const int L = ma.frames();
      double depth_total = 0, count_total = 0;
      int frames_hit = 0;
      for (int f = 0; f < L; ++f) {
        double depth;
        int count;
        frame_depths(ma.pose(f), mb.pose(f), bones, radius, &depth, &count);
        depth_total += depth;
        count_total += count;
        if (count > 0) ++frames_hit;
      }
      pp.pene_bone = L ? depth_total / L : 0.0;
      pp.contact = L ? count_total / L : 0.0;
      pp.cframe = L ? 100.0 * frames_hit / L : 0.0;
      rep.pairs.push_back(pp);
      rep.pene_bone += pp.pene_bone;
    }
  auto [contact, cframe] = contact_and_cframe(multi, skeleton, radius);
  rep.contact = contact;
  rep.cframe = cframe;

  double jit_sum = 0;
  for (const auto& [id, m] : multi.characters) {
    const double jv = jitter(m);
    rep.jitter_per_character.emplace_back(id, jv);
    jit_sum += jv;
  }
  if (!multi.characters.empty()) rep.jitter = jit_sum / multi.characters.size();

  if (!skeleton.foot_joints.empty()) {
    double sk_sum = 0;
    for (const auto& [id, m] : multi.characters) {
      const double sv = skating_ratio(m, skeleton);
      rep.skating_per_character.emplace_back(id, sv);
      sk_sum += sv;
    }
    if (!multi.characters.empty()) rep.skating_ratio = sk_sum / multi.characters.size();
  }
  return rep;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["pene_bone"] = pene_bone;
  j["contact"] = contact;
  j["cframe"] = cframe;
  j["jitter"] = jitter;
  if (skating_ratio)
    j["skating"] = *skating_ratio;
  else
    j["skating"] = nullptr;
  j["pairs"] = nlohmann::json::array();
  for (const PairPenetration& p : pairs)
    j["pairs"].push_back({{"a", p.a},
                          {"b", p.b},
                          {"pene_bone", p.pene_bone},
                          {"contact", p.contact},
                          {"cframe", p.cframe}});
  for (const auto& [id, v] : skating_per_character) j["skating_per_character"][id] = v;
  for (const auto& [id, v] : jitter_per_character) j["jitter_per_character"][id] = v;
  return j.dump(2);
}

std::string penetration_csv(const MultiPersonMotion& multi, const Skeleton& skeleton,
                            double radius) {
  check_multi(multi, skeleton);
  const auto bones = skeleton.bones();
  std::ostringstream out;
  out << "frame,char_a,char_b,depth\n";
  if (multi.characters.empty()) return out.str();
  const int L = multi.characters.front().second.frames();
  for (int f = 0; f < L; ++f)
    for (size_t i = 0; i < multi.characters.size(); ++i)
      for (size_t j = i + 1; j < multi.characters.size(); ++j) {
        double depth;
        int count;
        frame_depths(multi.characters[i].second.pose(f), multi.characters[j].second.pose(f),
                     bones, radius, &depth, &count);
        out << f << ',' << multi.characters[i].first << ',' << multi.characters[j].first << ','
            << depth << '\n';
      }
  return out.str();
}

}  // namespace gm::metrics
