#pragma once

// Small hand-built graphs. Node labels in comments and helper arguments are
// the 1-based labels of the drawings; graph ids are label - 1.

#include <random>
#include <utility>
#include <vector>

#include "hara/view_graph.h"
#include "test_util.h"

namespace hara::testing {

inline NodeId L(int label) { return label - 1; }
inline int Label(NodeId id) { return id + 1; }

inline std::vector<std::pair<NodeId, NodeId>> Labeled(
    const std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (auto [a, b] : pairs) out.emplace_back(L(a), L(b));
  return out;
}

// Triplet-support drawing: base 4 with family {1, 2, 3, 4}; candidates 5, 6
// and 7 are supported by the triplets (3,4,5), (4,5,7), (4,6,7), (3,4,7).
inline ViewGraph SupportFixture(std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const auto abs = RandomRotations(rng, 7);
  return GraphFromPairs(abs, Labeled({{1, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {4, 6},
                                      {4, 7}, {3, 5}, {3, 7}, {5, 7}, {6, 7}}));
}

// Voting drawing: family 1..5 on a path (so no triplet contains a family
// pair), node 6 sees 1, 3 and 5, node 7 sees 2, node 8 sees 2 and 4.
inline ViewGraph VoteFixture(std::uint64_t seed = 2) {
  std::mt19937_64 rng(seed);
  const auto abs = RandomRotations(rng, 8);
  return GraphFromPairs(abs, Labeled({{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 6},
                                      {3, 6}, {5, 6}, {2, 7}, {2, 8}, {4, 8}}));
}

// Toy walkthrough instance, 15 nodes. Node 1 has the most neighbors. Every
// edge agrees with the ground truth except (3, 12), which is replaced by a
// far-off rotation so that 12 can only join through the voting fallback.
inline const std::vector<std::pair<int, int>>& WalkthroughPairs() {
  static const std::vector<std::pair<int, int>> pairs = {
      {1, 2},   {1, 3},   {1, 4},   {1, 5},   {1, 6},   {1, 7},
      {1, 8},   {1, 12},  {2, 3},   {3, 4},   {3, 9},   {3, 10},
      {3, 11},  {3, 12},  {9, 11},  {10, 11}, {11, 12}, {12, 13},
      {12, 14}, {12, 15}, {13, 14}, {13, 15}, {14, 15}};
  return pairs;
}

inline ViewGraph WalkthroughFixture(std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  const auto abs = RandomRotations(rng, 15);
  std::vector<RelEdge> edges;
  for (auto [a, b] : WalkthroughPairs()) {
    RelEdge e = ConsistentEdge(abs, L(a), L(b));
    if (a == 3 && b == 12) e.rel = Exp(RotationVector(0, 2.5, 0)) * e.rel;
    edges.push_back(e);
  }
  std::vector<std::optional<Rotation>> gt(abs.begin(), abs.end());
  return ViewGraph::Build(15, edges, gt);
}

}  // namespace hara::testing
