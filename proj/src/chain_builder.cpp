#include "skelemotion/chain_builder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "text_util.hpp"

namespace skelemotion {

ChainOrder default_chain() {
  return ChainOrder{{2,  21, 3,  4,  3,  21, 5,  6,  7,  8,  22, 23, 22, 8,  7,  6,  5,
                     21, 9,  10, 11, 12, 24, 25, 24, 12, 11, 10, 9,  21, 2,  1,  13, 14,
                     15, 16, 15, 14, 13, 1,  17, 18, 19, 20, 19, 18, 17, 1,  2}};
}

std::vector<JointEdge> kinect_edges() {
  return {{1, 2},   {2, 21},  {3, 21},  {4, 3},   {5, 21},  {6, 5},   {7, 6},   {8, 7},
          {9, 21},  {10, 9},  {11, 10}, {12, 11}, {13, 1},  {14, 13}, {15, 14}, {16, 15},
          {17, 1},  {18, 17}, {19, 18}, {20, 19}, {22, 23}, {23, 8},  {24, 25}, {25, 12}};
}

ChainOrder depth_first_chain(const std::vector<JointEdge>& edges, int root) {
  std::map<int, std::set<int>> adjacency;
  for (const auto& [a, b] : edges) {
    if (a < 1 || b < 1) throw Error("joint indices must be positive");
    if (a == b) throw Error("self-loop at joint " + std::to_string(a));
    if (!adjacency[a].insert(b).second) {
      throw Error("duplicate edge " + std::to_string(a) + "-" + std::to_string(b));
    }
    adjacency[b].insert(a);
  }
  if (adjacency.empty()) {
    if (root < 1) throw Error("root must be a positive joint index");
    return ChainOrder{{root}};
  }
  if (!adjacency.count(root)) throw Error("root " + std::to_string(root) + " is not in the tree");
  if (edges.size() + 1 > adjacency.size()) {
    throw Error("adjacency contains a cycle: " + std::to_string(adjacency.size()) + " joints, " +
                std::to_string(edges.size()) + " edges");
  }

  // Iterative walk; each stack frame remembers the next neighbour to try.
  struct Frame {
    int joint;
    int parent;
    std::set<int>::const_iterator next;
  };
  ChainOrder chain;
  std::set<int> visited{root};
  std::vector<Frame> stack{{root, 0, adjacency[root].cbegin()}};
  chain.entries.push_back(root);
  while (!stack.empty()) {
    Frame& top = stack.back();
    const auto& neighbours = adjacency[top.joint];
    while (top.next != neighbours.cend() && *top.next == top.parent) ++top.next;
    if (top.next == neighbours.cend()) {
      stack.pop_back();
      if (!stack.empty()) chain.entries.push_back(stack.back().joint);
      continue;
    }
    const int child = *top.next++;
    if (!visited.insert(child).second) throw Error("adjacency contains a cycle");
    chain.entries.push_back(child);
    stack.push_back({child, top.joint, adjacency[child].cbegin()});
  }
  // A connected tree visits every joint; with |E| = |V| - 1 a miss means a cycle elsewhere.
  if (visited.size() != adjacency.size()) {
    throw Error(edges.size() + 1 == adjacency.size() ? "adjacency is disconnected and contains a cycle"
                                                     : "adjacency is disconnected");
  }
  return chain;
}

void validate_chain(const ChainOrder& chain, std::size_t joint_count) {
  if (chain.entries.empty()) throw Error("chain is empty");
  for (std::size_t i = 0; i < chain.entries.size(); ++i) {
    const int e = chain.entries[i];
    if (e < 1 || static_cast<std::size_t>(e) > joint_count) {
      throw Error("chain entry " + std::to_string(i + 1) + " = " + std::to_string(e) +
                  " outside [1, " + std::to_string(joint_count) + "]");
    }
  }
}

ChainOrder parse_chain(std::string_view text) {
  detail::LineReader reader(text);
  ChainOrder chain;
  while (auto line = reader.next()) {
    std::string_view s = *line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    auto v = detail::parse_integer<int>(s);
    if (!v) throw ParseError(reader.line_number(), "invalid joint index '" + std::string(s) + "'");
    chain.entries.push_back(*v);
  }
  validate_chain(chain);
  return chain;
}

ChainMatrix build_chain_matrix(const BodyTrack& track, const ChainOrder& chain) {
  validate_chain(chain);
  const std::size_t frames = track.frames.size();
  ChainMatrix out{Array3<double>(chain.length(), frames, 3)};
  for (std::size_t c = 0; c < chain.length(); ++c) {
    const auto joint = static_cast<std::size_t>(chain.entries[c] - 1);
    for (std::size_t t = 0; t < frames; ++t) {
      const JointPosition& p = track.frames[t][joint];
      out.values(c, t, 0) = p.x;
      out.values(c, t, 1) = p.y;
      out.values(c, t, 2) = p.z;
    }
  }
  return out;
}

}  // namespace skelemotion
