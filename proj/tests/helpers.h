#pragma once
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "graphmotion/types.h"

namespace test_helpers {

// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::uint64_t counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    do {
      path = base / ("gm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    } while (std::filesystem::exists(path));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool same_bits(const gm::MotionSequence& a, const gm::MotionSequence& b) {
  if (a.joints != b.joints || a.data.size() != b.data.size()) return false;
  for (size_t k = 0; k < a.data.size(); ++k)
    for (int ax = 0; ax < 3; ++ax)
      if (a.data[k][ax] != b.data[k][ax]) return false;
  return true;
}

inline double max_abs_diff(const gm::MotionSequence& a, const gm::MotionSequence& b) {
  double m = 0;
  for (size_t k = 0; k < a.data.size(); ++k)
    m = std::max(m, (a.data[k] - b.data[k]).cwiseAbs().maxCoeff());
  return m;
}

inline gm::Vec3 random_point(std::mt19937_64& eng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return gm::Vec3(u(eng), u(eng), u(eng));
}

// Uniform rotation from a random quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937_64& eng) {
  std::normal_distribution<double> n(0, 1);
  Eigen::Vector4d q(n(eng), n(eng), n(eng), n(eng));
  q.normalize();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

}  // namespace test_helpers
