#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hara/so3.h"

namespace hara {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

// Relative-rotation constraint R_ij = R_i R_j^T. After ViewGraph::Build the
// endpoints satisfy i < j.
struct RelEdge {
  NodeId i = 0;
  NodeId j = 0;
  Rotation rel;
  std::optional<int> inlier_count;
};

// Immutable view graph. Edges are stored sorted by (i, j); adjacency is CSR
// with neighbor lists sorted ascending, so construction is independent of the
// input edge order.
class ViewGraph {
 public:
  ViewGraph() = default;

  // Throws kInvalidNode, kInvalidEdge (self-loop) or kDuplicateConstraint.
  // Edges given as (j, i) with j > i are flipped and their rotation inverted.
  static ViewGraph Build(int num_nodes, std::vector<RelEdge> edges,
                         std::vector<std::optional<Rotation>> ground_truth = {});

  int num_nodes() const { return num_nodes_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<RelEdge>& edges() const { return edges_; }
  const RelEdge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {adj_nodes_.data() + adj_offsets_[i],
            adj_nodes_.data() + adj_offsets_[i + 1]};
  }
  // Parallel to neighbors(i).
  std::span<const EdgeId> incident_edges(NodeId i) const {
    return {adj_edges_.data() + adj_offsets_[i],
            adj_edges_.data() + adj_offsets_[i + 1]};
  }
  int degree(NodeId i) const { return adj_offsets_[i + 1] - adj_offsets_[i]; }

  std::optional<EdgeId> FindEdge(NodeId a, NodeId b) const;

  // R_ab, inverting the stored rotation when a > b. Throws kMissingConstraint.
  Rotation Relative(NodeId a, NodeId b) const;

  // Rotation of edge e read in the direction from -> other endpoint.
  Rotation Oriented(EdgeId e, NodeId from) const {
    const RelEdge& ed = edges_[e];
    return from == ed.i ? ed.rel : ed.rel.inverse();
  }

  std::vector<NodeId> CommonNeighbors(NodeId a, NodeId b) const;

  // Calls fn(k, edge(a,k), edge(b,k)) for each common neighbor k in ascending
  // order. fn returns false to stop early.
  template <typename Fn>
  void ForEachCommonNeighbor(NodeId a, NodeId b, Fn&& fn) const {
    const auto na = neighbors(a);
    const auto nb = neighbors(b);
    const auto ea = incident_edges(a);
    const auto eb = incident_edges(b);
    std::size_t x = 0;
    std::size_t y = 0;
    while (x < na.size() && y < nb.size()) {
      if (na[x] < nb[y]) {
        ++x;
      } else if (nb[y] < na[x]) {
        ++y;
      } else {
        if (!fn(na[x], ea[x], eb[y])) return;
        ++x;
        ++y;
      }
    }
  }

  // Component label per node, labels numbered by first appearance in node
  // order.
  const std::vector<int>& component_labels() const { return component_; }
  int num_components() const { return num_components_; }
  // Node lists per component, largest first (ties: smallest first node).
  std::vector<std::vector<NodeId>> Components() const;

  const std::vector<std::optional<Rotation>>& ground_truth() const {
    return ground_truth_;
  }
  bool has_ground_truth() const;
  bool has_inlier_counts() const;

  // Id of node i in the graph this one was extracted from (identity for a
  // freshly built graph).
  const std::vector<NodeId>& original_ids() const { return original_ids_; }

  // Induced subgraph on `nodes`; local id = position in `nodes`.
  ViewGraph Subgraph(std::span<const NodeId> nodes) const;
  // Same node set, only the listed edges.
  ViewGraph WithEdges(std::span<const EdgeId> keep) const;
  // Same node set, edges whose inlier count (missing = 0) is >= min_count.
  ViewGraph WithMinInliers(int min_count) const;

 private:
  void Index();

  int num_nodes_ = 0;
  std::vector<RelEdge> edges_;
  std::vector<int> adj_offsets_{0};
  std::vector<NodeId> adj_nodes_;
  std::vector<EdgeId> adj_edges_;
  std::vector<int> component_;
  int num_components_ = 0;
  std::vector<std::optional<Rotation>> ground_truth_;
  std::vector<NodeId> original_ids_;
};

}  // namespace hara
