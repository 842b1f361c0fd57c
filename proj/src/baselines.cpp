#include "skelemotion/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace skelemotion {

ChainOrder identity_chain(std::size_t joint_count) {
  ChainOrder chain;
  chain.entries.resize(joint_count);
  std::iota(chain.entries.begin(), chain.entries.end(), 1);
  return chain;
}

Array3<double> minmax_normalize_per_axis(const Array3<double>& values) {
  Array3<double> out = values;
  for (std::size_t k = 0; k < values.dim2(); ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < values.dim0(); ++i) {
      for (std::size_t j = 0; j < values.dim1(); ++j) {
        lo = std::min(lo, values(i, j, k));
        hi = std::max(hi, values(i, j, k));
      }
    }
    const double range = std::max(hi - lo, kNormalizeEpsilon);
    for (std::size_t i = 0; i < values.dim0(); ++i) {
      for (std::size_t j = 0; j < values.dim1(); ++j) out(i, j, k) = (values(i, j, k) - lo) / range;
    }
  }
  return out;
}

Array3<double> symmetric_normalize_per_axis(const Array3<double>& values) {
  Array3<double> out = values;
  for (std::size_t k = 0; k < values.dim2(); ++k) {
    double peak = 0.0;
    for (std::size_t i = 0; i < values.dim0(); ++i) {
      for (std::size_t j = 0; j < values.dim1(); ++j) peak = std::max(peak, std::abs(values(i, j, k)));
    }
    const double scale = 2.0 * std::max(peak, kNormalizeEpsilon);
    for (std::size_t i = 0; i < values.dim0(); ++i) {
      for (std::size_t j = 0; j < values.dim1(); ++j) out(i, j, k) = 0.5 + values(i, j, k) / scale;
    }
  }
  return out;
}

namespace {

std::vector<ChannelDescriptor> axis_layout(ChannelKind kind, int scale) {
  return {{0, kind, scale, "x"}, {0, kind, scale, "y"}, {0, kind, scale, "z"}};
}

void check_track(const BodyTrack& track) {
  if (track.frame_count() < 1) throw Error("track has no frames");
  if (!track.dense()) throw Error("track has missing frames; densify before encoding");
}

}  // namespace

EncodedImage encode_tssi(const BodyTrack& track, const ChainOrder& chain, const EncoderConfig& cfg) {
  check_track(track);
  if (cfg.target_width < 1) throw Error("target width must be positive");
  const ChainMatrix s = build_chain_matrix(track, chain);
  return to_encoded_image(resize_temporal(minmax_normalize_per_axis(s.values), cfg.target_width),
                          axis_layout(ChannelKind::coordinate, 0));
}

EncodedImage encode_coordinate_image(const BodyTrack& track, const EncoderConfig& cfg) {
  return encode_tssi(track, identity_chain(), cfg);
}

EncodedImage encode_naive_motion(const BodyTrack& track, const EncoderConfig& cfg) {
  check_track(track);
  if (track.frame_count() < 2) {
    throw Error("track too short: naive motion needs at least 2 frames, got " +
                std::to_string(track.frame_count()));
  }
  const MotionTensor motion = motion_difference(build_chain_matrix(track, identity_chain()), 1);
  return to_encoded_image(
      resize_temporal(symmetric_normalize_per_axis(motion.values), cfg.target_width),
      axis_layout(ChannelKind::naive_motion, 1));
}

}  // namespace skelemotion
