#include "graphmotion/motion_io.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gm::io {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw ValidationError("short write to " + path);
}

json skeleton_to_json(const Skeleton& s) {
  json j;
  j["name"] = s.name;
  j["joints"] = s.joint_names;
  j["parents"] = s.parents;
  j["chains"] = s.chains;
  j["foot_joints"] = s.foot_joints;
  json base = json::array();
  for (const auto& p : s.base_pose) base.push_back({p.x(), p.y(), p.z()});
  j["base_pose"] = base;
  return j;
}

Skeleton skeleton_from_json(const json& j) {
  Skeleton s;
  s.name = j.value("name", std::string("unnamed"));
  s.joint_names = j.at("joints").get<std::vector<std::string>>();
  s.parents = j.at("parents").get<std::vector<int>>();
  s.chains = j.at("chains").get<std::vector<std::vector<int>>>();
  s.foot_joints = j.value("foot_joints", std::vector<int>{});
  if (j.contains("base_pose")) {
    for (const auto& p : j.at("base_pose")) {
      if (!p.is_array() || p.size() != 3) throw ValidationError("base_pose entries must be [x,y,z]");
      s.base_pose.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
  }
  s.validate();
  return s;
}

}  // namespace

std::string skeleton_to_json_text(const Skeleton& skeleton) {
  return skeleton_to_json(skeleton).dump(2);
}

Skeleton skeleton_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("skeleton json parse error: ") + e.what());
  }
  try {
    return skeleton_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("skeleton json: ") + e.what());
  }
}

void save_motion_json(const std::string& path, const MotionSequence& motion,
                      const Skeleton& skeleton) {
  if (motion.joints <= 0 || motion.frames() <= 0)
    throw ValidationError("cannot save an empty motion");
  if (motion.joints != skeleton.joint_count())
    throw ValidationError("motion joint count does not match skeleton");
  json j;
  j["fps"] = motion.fps;
  if (skeleton.name == "default22")
    j["skeleton"] = "default22";
  else
    j["skeleton"] = skeleton_to_json(skeleton);
  j["joints"] = skeleton.joint_names;
  json frames = json::array();
  for (int f = 0; f < motion.frames(); ++f) {
    json pose = json::array();
    for (int jt = 0; jt < motion.joints; ++jt) {
      const Vec3& p = motion.at(f, jt);
      pose.push_back({p.x(), p.y(), p.z()});
    }
    frames.push_back(std::move(pose));
  }
  j["frames"] = std::move(frames);
  write_file(path, j.dump());
}

LoadedMotion load_motion_json(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError(path + ": json parse error: " + e.what());
  }
  LoadedMotion out;
  try {
    if (!j.contains("skeleton") || j["skeleton"] == "default22")
      out.skeleton = default_skeleton();
    else
      out.skeleton = skeleton_from_json(j.at("skeleton"));
    out.motion.fps = static_cast<int>(j.value("fps", 30.0));
    if (!(out.motion.fps > 0)) throw ValidationError(path + ": fps must be positive");
    if (j.contains("joints")) {
      auto names = j.at("joints").get<std::vector<std::string>>();
      if (names != out.skeleton.joint_names)
        throw ValidationError(path + ": joint name list does not match skeleton");
    }
    const json& frames = j.at("frames");
    if (!frames.is_array() || frames.empty())
      throw ValidationError(path + ": frames must be a non-empty array");
    const int J = out.skeleton.joint_count();
    out.motion.joints = J;
    out.motion.data.reserve(frames.size() * static_cast<size_t>(J));
    int f = 0;
    for (const auto& pose : frames) {
      if (!pose.is_array() || static_cast<int>(pose.size()) != J)
        throw ValidationError(path + ": frame " + std::to_string(f) + " has " +
                              std::to_string(pose.size()) + " joints, expected " + std::to_string(J));
      for (int jt = 0; jt < J; ++jt) {
        const auto& p = pose[jt];
        if (!p.is_array() || p.size() != 3)
          throw ValidationError(path + ": frame " + std::to_string(f) + " joint " +
                                std::to_string(jt) + " is not [x,y,z]");
        Vec3 v(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        if (!v.allFinite())
          throw ValidationError(path + ": non-finite coordinate at frame " + std::to_string(f) +
                                " joint " + out.skeleton.joint_names[jt]);
        out.motion.data.push_back(v);
      }
      ++f;
    }
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return out;
}

void save_motion_gmo(const std::string& path, const MotionSequence& motion) {
  if (motion.joints <= 0 || motion.frames() <= 0)
    throw ValidationError("cannot save an empty motion");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out.write("GMO1", 4);
  uint32_t joints = static_cast<uint32_t>(motion.joints);
  uint32_t frames = static_cast<uint32_t>(motion.frames());
  double fps = motion.fps;
  out.write(reinterpret_cast<const char*>(&joints), 4);
  out.write(reinterpret_cast<const char*>(&frames), 4);
  out.write(reinterpret_cast<const char*>(&fps), 8);
  for (const Vec3& p : motion.data) {
    double xyz[3] = {p.x(), p.y(), p.z()};
    out.write(reinterpret_cast<const char*>(xyz), 24);
  }
  if (!out) throw ValidationError("short write to " + path);
}

MotionSequence load_motion_gmo(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GMO1", 4) != 0)
    throw ValidationError(path + ": not a GMO1 file");
  uint32_t joints = 0, frames = 0;
  double fps = 0;
  in.read(reinterpret_cast<char*>(&joints), 4);
  in.read(reinterpret_cast<char*>(&frames), 4);
  in.read(reinterpret_cast<char*>(&fps), 8);
  if (!in || joints == 0 || frames == 0 || !(fps > 0))
    throw ValidationError(path + ": corrupt GMO1 header");
  MotionSequence m;
  m.fps = static_cast<int>(fps);
  m.joints = static_cast<int>(joints);
  m.data.resize(static_cast<size_t>(joints) * frames);
  for (auto& p : m.data) {
    double xyz[3];
    in.read(reinterpret_cast<char*>(xyz), 24);
    if (!in) throw ValidationError(path + ": truncated GMO1 payload");
    p = Vec3(xyz[0], xyz[1], xyz[2]);
    if (!p.allFinite()) throw ValidationError(path + ": non-finite coordinate");
  }
  return m;
}

namespace {
bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

void save_motion(const std::string& path, const MotionSequence& motion, const Skeleton& skeleton) {
  if (ends_with(path, ".json"))
    save_motion_json(path, motion, skeleton);
  else if (ends_with(path, ".gmo"))
    save_motion_gmo(path, motion);
  else
    throw ValidationError("unknown motion extension on " + path + " (use .json or .gmo)");
}

LoadedMotion load_motion(const std::string& path) {
  if (ends_with(path, ".json")) return load_motion_json(path);
  if (ends_with(path, ".gmo")) {
    LoadedMotion out;
    out.motion = load_motion_gmo(path);
    if (out.motion.joints != default_skeleton().joint_count())
      throw ValidationError(path + ": binary motions carry no skeleton; only 22-joint files load");
    out.skeleton = default_skeleton();
    return out;
  }
  throw ValidationError("unknown motion extension on " + path + " (use .json or .gmo)");
}

}  // namespace gm::io
