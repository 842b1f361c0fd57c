#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "skelemotion/chain_builder.hpp"
#include "support/fixtures.hpp"

using namespace skelemotion;

TEST_CASE("default_chain is the published 49-entry chain") {
  const std::vector<int> published = {2,  21, 3,  4,  3,  21, 5,  6,  7,  8,  22, 23, 22, 8,  7,  6,  5,
                                      21, 9,  10, 11, 12, 24, 25, 24, 12, 11, 10, 9,  21, 2,  1,  13, 14,
                                      15, 16, 15, 14, 13, 1,  17, 18, 19, 20, 19, 18, 17, 1,  2};
  const ChainOrder chain = default_chain();
  CHECK(chain.entries == published);
  CHECK(chain.length() == 49);
  CHECK(chain.entries.front() == 2);
  CHECK(chain.entries.back() == 2);
  for (int e : chain.entries) CHECK((e >= 1 && e <= 25));
  // Every Kinect joint appears.
  CHECK(std::set<int>(chain.entries.begin(), chain.entries.end()).size() == 25);
}

TEST_CASE("depth_first_chain on small trees") {
  CHECK(depth_first_chain({{1, 2}, {2, 3}}, 1).entries == std::vector<int>{1, 2, 3, 2, 1});
  CHECK(depth_first_chain({{1, 3}, {1, 2}}, 1).entries == std::vector<int>{1, 2, 1, 3, 1});
  CHECK(depth_first_chain({{1, 2}, {2, 3}}, 2).entries == std::vector<int>{2, 1, 2, 3, 2});
  CHECK(depth_first_chain({}, 4).entries == std::vector<int>{4});
}

TEST_CASE("depth_first_chain rejects non-trees") {
  CHECK_THROWS_WITH_AS(depth_first_chain({{1, 2}, {2, 3}, {3, 1}}, 1), doctest::Contains("cycle"), Error);
  CHECK_THROWS_WITH_AS(depth_first_chain({{1, 2}, {3, 4}}, 1), doctest::Contains("disconnected"), Error);
  CHECK_THROWS_WITH_AS(depth_first_chain({{1, 2}, {3, 4}, {4, 5}, {5, 3}}, 1), doctest::Contains("disconnected"),
                       Error);
  CHECK_THROWS_WITH_AS(depth_first_chain({{1, 2}, {3, 4}, {4, 5}, {5, 3}}, 1), doctest::Contains("cycle"),
                       Error);
  CHECK_THROWS_AS(depth_first_chain({{1, 2}}, 9), Error);
  CHECK_THROWS_AS(depth_first_chain({{1, 1}}, 1), Error);
}

TEST_CASE("depth_first_chain over the Kinect bone list") {
  // Independent recursive traversal (ascending children) computed offline and
  // frozen here. It differs from the published chain in the order of the
  // root's subtrees and in the hand-tip/thumb order, so default_chain() stays
  // the reference.
  const std::vector<int> traversal = {2,  1,  13, 14, 15, 16, 15, 14, 13, 1,  17, 18, 19, 20, 19, 18, 17,
                                      1,  2,  21, 3,  4,  3,  21, 5,  6,  7,  8,  23, 22, 23, 8,  7,  6,
                                      5,  21, 9,  10, 11, 12, 25, 24, 25, 12, 11, 10, 9,  21, 2};
  const ChainOrder chain = depth_first_chain(kinect_edges(), 2);
  CHECK(chain.entries == traversal);
  CHECK(chain.length() == default_chain().length());
  CHECK(chain != default_chain());
  auto sorted_a = chain.entries, sorted_b = default_chain().entries;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  CHECK(sorted_a != sorted_b);  // 22/23 and 24/25 occur with different multiplicity
}

TEST_CASE("depth_first_chain length is 2E+1 on random trees") {
  std::mt19937_64 rng(8);
  for (int n = 1; n <= 40; ++n) {
    std::vector<JointEdge> edges;
    for (int v = 2; v <= n; ++v) edges.push_back({static_cast<int>(rng() % (v - 1)) + 1, v});
    std::shuffle(edges.begin(), edges.end(), rng);
    const int root = static_cast<int>(rng() % n) + 1;
    const ChainOrder chain = depth_first_chain(edges, root);
    CHECK(chain.length() == 2 * edges.size() + 1);
    CHECK(chain.entries.front() == root);
    CHECK(chain.entries.back() == root);
    // Consecutive entries are always tree neighbours.
    std::set<std::pair<int, int>> adj;
    for (auto [a, b] : edges) {
      adj.insert({a, b});
      adj.insert({b, a});
    }
    for (std::size_t i = 1; i < chain.length(); ++i) {
      CHECK(adj.count({chain.entries[i - 1], chain.entries[i]}) == 1);
    }
  }
}

TEST_CASE("parse_chain") {
  CHECK(parse_chain("# custom\n1\n2\n\n3 # tail\n").entries == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(parse_chain("1\nx\n"), ParseError);
  CHECK_THROWS_AS(parse_chain("1\n26\n"), Error);
  CHECK_THROWS_AS(parse_chain(""), Error);
}

TEST_CASE("build_chain_matrix") {
  const ChainOrder chain = default_chain();

  SUBCASE("all-zero track") {
    const auto m = build_chain_matrix(fixtures::constant_track(7, 0.0), chain);
    CHECK(m.chain_length() == 49);
    CHECK(m.frame_count() == 7);
    CHECK(m.values.dim2() == 3);
    for (double v : m.values.flat()) CHECK(v == 0.0);
  }
  SUBCASE("joint j holds value j on x") {
    JointFrame frame{};
    for (std::size_t j = 0; j < kJointCount; ++j) frame[j] = {static_cast<double>(j + 1), -1.0, 0.5};
    const auto m = build_chain_matrix(fixtures::make_track(0, {frame, frame, frame}), chain);
    for (std::size_t c = 0; c < chain.length(); ++c) {
      for (std::size_t t = 0; t < 3; ++t) {
        CHECK(m.values(c, t, 0) == static_cast<double>(chain.entries[c]));
        CHECK(m.values(c, t, 1) == -1.0);
        CHECK(m.values(c, t, 2) == 0.5);
      }
    }
  }
  SUBCASE("single frame") {
    const auto m = build_chain_matrix(fixtures::constant_track(1, 2.0), chain);
    CHECK(m.chain_length() == 49);
    CHECK(m.frame_count() == 1);
  }
  SUBCASE("out-of-range entry") {
    CHECK_THROWS_AS(build_chain_matrix(fixtures::constant_track(2), ChainOrder{{1, 26}}), Error);
    CHECK_THROWS_AS(build_chain_matrix(fixtures::constant_track(2), ChainOrder{{0}}), Error);
  }
}

TEST_CASE("build_chain_matrix is a gather") {
  std::mt19937_64 rng(2);
  const auto track = fixtures::random_track(rng, 9);
  const ChainOrder chain = default_chain();
  const auto m = build_chain_matrix(track, chain);
  for (std::size_t c = 0; c < chain.length(); ++c) {
    const auto& j = track.frames[4][static_cast<std::size_t>(chain.entries[c] - 1)];
    CHECK(m.values(c, 4, 0) == j.x);
    CHECK(m.values(c, 4, 1) == j.y);
    CHECK(m.values(c, 4, 2) == j.z);
  }
  // Duplicated chain joints give identical rows (chain positions 2 and 4 are both joint 3).
  for (std::size_t t = 0; t < 9; ++t) {
    for (std::size_t a = 0; a < 3; ++a) CHECK(m.values(2, t, a) == m.values(4, t, a));
  }
  // Permuting the chain permutes rows.
  ChainOrder reversed = chain;
  std::reverse(reversed.entries.begin(), reversed.entries.end());
  const auto r = build_chain_matrix(track, reversed);
  for (std::size_t c = 0; c < chain.length(); ++c) {
    for (std::size_t t = 0; t < 9; ++t) {
      for (std::size_t a = 0; a < 3; ++a) CHECK(r.values(c, t, a) == m.values(48 - c, t, a));
    }
  }
}
