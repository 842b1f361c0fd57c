#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skelemotion/array3.hpp"
#include "skelemotion/chain_builder.hpp"
#include "skelemotion/skeleton_data.hpp"

namespace skelemotion {

// Displacement of every chain joint over `distance` frames: C x (T - d) x 3.
struct MotionTensor {
  Array3<double> values;
  int distance = 1;
};

// Euclidean length of each displacement: C x (T - d) x 1.
struct MagnitudeMap {
  Array3<double> values;
  int distance = 1;
};

// Displacement angles in radians on the xy, yz and zx planes: C x (T - d) x 3.
struct OrientationMap {
  Array3<double> values;
  int distance = 1;
};

enum class Plane { xy = 0, yz = 1, zx = 2 };

// ---------------------------------------------------------------------------
// Channel bookkeeping

enum class ChannelKind { magnitude, orientation, coordinate, naive_motion, padding };

// One channel of an encoded image. scale is the temporal distance for motion
// channels and 0 otherwise; component names the plane (xy/yz/zx) or axis
// (x/y/z), empty for magnitude.
struct ChannelDescriptor {
  int person = 0;
  ChannelKind kind = ChannelKind::magnitude;
  int scale = 0;
  std::string component;

  friend bool operator==(const ChannelDescriptor&, const ChannelDescriptor&) = default;
};

// Textual form, e.g. "p0/mag/d5", "p1/ori/d10/xy", "p0/coord/x", "p1/pad".
std::string to_string(const ChannelDescriptor& d);
ChannelDescriptor parse_channel_descriptor(std::string_view text);

// Comma-separated list of descriptors.
std::string layout_to_string(const std::vector<ChannelDescriptor>& layout);
std::vector<ChannelDescriptor> parse_layout(std::string_view text);

// Final network input: rows x width x channels, every value in [0, 1].
struct EncodedImage {
  Array3<float> values;
  std::vector<ChannelDescriptor> layout;

  std::size_t rows() const { return values.dim0(); }
  std::size_t width() const { return values.dim1(); }
  std::size_t channels() const { return values.dim2(); }

  friend bool operator==(const EncodedImage&, const EncodedImage&) = default;
};

// ---------------------------------------------------------------------------
// Configuration

enum class Representation { magnitude, orientation, magnitude_orientation };

// How magnitude channels of different temporal scales are normalized.
enum class Normalization {
  per_scale,     // each scale divided by its own maximum
  across_scales  // all scales divided by the largest maximum among them
};

struct EncoderConfig {
  Representation representation = Representation::magnitude;
  std::vector<int> magnitude_distances{5, 10, 15};
  std::vector<int> orientation_distances{1, 10, 20};
  double magnitude_threshold = 0.004;
  std::size_t target_width = 100;
  std::size_t max_persons = 2;
  Normalization normalization = Normalization::per_scale;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

std::string_view to_string(Representation r);
Representation parse_representation(std::string_view name);
std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view name);

// "5,10,15" -> {5, 10, 15}.
std::vector<int> parse_distances(std::string_view text);

// Throws Error on empty or non-increasing distances, non-positive distances,
// negative threshold, width < 2 or zero persons.
void validate(const EncoderConfig& cfg);

// `key = value` lines; `#` starts a comment. Keys: representation, distances
// (sets both lists), magnitude_distances, orientation_distances, threshold,
// width, persons, normalization. Unspecified keys keep the values of `base`.
EncoderConfig parse_encoder_config(std::string_view text, EncoderConfig base = {});

// ---------------------------------------------------------------------------
// Motion maps

MotionTensor motion_difference(const ChainMatrix& chain_matrix, int distance);
MagnitudeMap magnitude(const MotionTensor& motion);
OrientationMap orientation(const MotionTensor& motion);

// Zeroes all three angles where magnitude < threshold.
OrientationMap filter_orientation(const OrientationMap& theta, const MagnitudeMap& mag,
                                  double threshold);

// Scale-weighted variant: zeroes where magnitude < threshold * distance.
OrientationMap filter_orientation_tsa(const OrientationMap& theta, const MagnitudeMap& mag,
                                      double threshold, int distance);

// ---------------------------------------------------------------------------
// Image assembly

enum class NormalizeStrategy {
  magnitude,   // v / max(global max, 1e-8)
  orientation  // (v + pi) / (2 pi)
};

inline constexpr double kNormalizeEpsilon = 1e-8;

Array3<double> normalize(const Array3<double>& values, NormalizeStrategy strategy);

// Linear interpolation along the middle (time) axis onto `width` columns with
// both endpoints aligned. A single input column is broadcast.
Array3<double> resize_temporal(const Array3<double>& image, std::size_t width);

// Single-person SkeleMotion image. The track must be dense and longer than
// the largest configured distance.
EncodedImage encode_skelemotion(const BodyTrack& track, const ChainOrder& chain,
                                const EncoderConfig& cfg);

// Channel-concatenates per-person images, zero-padding up to max_persons.
EncodedImage stack_persons(std::span<const EncodedImage> images, std::size_t max_persons);

// Channel-concatenates different representations of the same sample.
EncodedImage early_fuse(std::span<const EncodedImage> images);

// Converts a [0, 1] double image into an EncodedImage, clamping stray rounding.
EncodedImage to_encoded_image(const Array3<double>& values, std::vector<ChannelDescriptor> layout);

// Channel-concatenation of double images of equal rows and width.
Array3<double> concat_channels(std::span<const Array3<double>> parts);

}  // namespace skelemotion
