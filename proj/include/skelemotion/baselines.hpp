#pragma once

#include "skelemotion/array3.hpp"
#include "skelemotion/chain_builder.hpp"
#include "skelemotion/motion_encoder.hpp"
#include "skelemotion/skeleton_data.hpp"

namespace skelemotion {

// Joints in their natural order 1..J.
ChainOrder identity_chain(std::size_t joint_count = kJointCount);

// Per-axis min-max rescale over the whole array; constant axes map to 0.
Array3<double> minmax_normalize_per_axis(const Array3<double>& values);

// Per-axis symmetric rescale: v -> 0.5 + 0.5 * v / max|v| so that zero lands on 0.5.
Array3<double> symmetric_normalize_per_axis(const Array3<double>& values);

// Raw coordinates in natural joint order, J x W x 3.
EncodedImage encode_coordinate_image(const BodyTrack& track, const EncoderConfig& cfg);

// Raw coordinates along the traversal chain, C x W x 3.
EncodedImage encode_tssi(const BodyTrack& track, const ChainOrder& chain, const EncoderConfig& cfg);

// Consecutive-frame displacements in natural joint order, J x W x 3. Needs T >= 2.
EncodedImage encode_naive_motion(const BodyTrack& track, const EncoderConfig& cfg);

}  // namespace skelemotion
