#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "skelemotion/skeleton_data.hpp"

namespace fixtures {

using skelemotion::BodyTrack;
using skelemotion::JointFrame;
using skelemotion::kJointCount;

inline BodyTrack make_track(std::uint64_t id, std::vector<JointFrame> frames) {
  BodyTrack t;
  t.body_id = id;
  t.present.assign(frames.size(), true);
  t.frames = std::move(frames);
  return t;
}

inline BodyTrack random_track(std::mt19937_64& rng, std::size_t frames, std::uint64_t id = 0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<JointFrame> f(frames);
  for (auto& frame : f) {
    for (auto& j : frame) j = {u(rng), u(rng), u(rng)};
  }
  return make_track(id, std::move(f));
}

inline BodyTrack constant_track(std::size_t frames, double value = 0.0, std::uint64_t id = 0) {
  JointFrame frame;
  for (auto& j : frame) j = {value, value, value};
  return make_track(id, std::vector<JointFrame>(frames, frame));
}

// Every joint moves by `step` per frame, starting from a joint-dependent offset.
inline BodyTrack linear_track(std::size_t frames, skelemotion::JointPosition step, std::uint64_t id = 0) {
  std::vector<JointFrame> f(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const double td = static_cast<double>(t), off = 0.1 * static_cast<double>(j);
      f[t][j] = {off + step.x * td, -off + step.y * td, 2 * off + step.z * td};
    }
  }
  return make_track(id, std::move(f));
}

// frames[f] lists the (body id, joints) pairs visible in frame f.
using NtuFrame = std::vector<std::pair<std::uint64_t, JointFrame>>;

// Renders the NTU `.skeleton` layout, including the per-body info line, the
// joint-count line and 12-field joint lines.
inline std::string ntu_text(const std::vector<NtuFrame>& frames, bool with_joint_count = true) {
  std::ostringstream out;
  out.precision(17);
  out << frames.size() << "\n";
  for (const auto& frame : frames) {
    out << frame.size() << "\n";
    for (const auto& [id, joints] : frame) {
      out << id << " 0 1 1 1 1 0 0.1 -0.2 2\n";
      if (with_joint_count) out << kJointCount << "\n";
      for (const auto& j : joints) {
        out << j.x << " " << j.y << " " << j.z << " 250.5 200.1 1000.2 500.3 0.1 0.2 0.3 0.9 2\n";
      }
    }
  }
  return out.str();
}

inline JointFrame filled_frame(double base) {
  JointFrame f;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const double v = base + 0.01 * static_cast<double>(j);
    f[j] = {v, -v, 2 * v};
  }
  return f;
}

}  // namespace fixtures
