#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "skelemotion/array3.hpp"
#include "skelemotion/skeleton_data.hpp"

namespace skelemotion {

// Joint traversal order with repeats. Entries are 1-based joint indices.
struct ChainOrder {
  std::vector<int> entries;

  std::size_t length() const { return entries.size(); }
  friend bool operator==(const ChainOrder&, const ChainOrder&) = default;
};

// Joint coordinates gathered along a chain: chain position x frame x axis.
struct ChainMatrix {
  Array3<double> values;

  std::size_t chain_length() const { return values.dim0(); }
  std::size_t frame_count() const { return values.dim1(); }
};

using JointEdge = std::pair<int, int>;

// The 49-entry depth-first chain over the 25 Kinect v2 joints.
ChainOrder default_chain();

// Bone list of the NTU RGB+D skeleton, 1-based.
std::vector<JointEdge> kinect_edges();

// Depth-first walk of a tree given as an undirected edge list. Children are
// visited in ascending index order; a joint is appended on entry and again on
// every return to it, so a tree with E edges yields 2E + 1 entries.
// Throws Error if the edges do not form a tree containing root.
ChainOrder depth_first_chain(const std::vector<JointEdge>& edges, int root);

// Throws Error unless every entry lies in [1, joint_count].
void validate_chain(const ChainOrder& chain, std::size_t joint_count = kJointCount);

// One joint index per line; blank lines and `#` comments are ignored.
ChainOrder parse_chain(std::string_view text);

// values(c, t, axis) = track.frames[t][chain.entries[c] - 1][axis].
// Absent frames of a non-dense track are read as stored; densify first.
ChainMatrix build_chain_matrix(const BodyTrack& track, const ChainOrder& chain);

}  // namespace skelemotion
