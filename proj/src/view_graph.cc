#include "hara/view_graph.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "hara/error.h"

namespace hara {

ViewGraph ViewGraph::Build(int num_nodes, std::vector<RelEdge> edges,
                           std::vector<std::optional<Rotation>> ground_truth) {
  if (num_nodes < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative node count");
  }
  for (RelEdge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= num_nodes || e.j >= num_nodes) {
      throw Error(ErrorCode::kInvalidNode,
                  "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                      ") has an endpoint outside [0, " +
                      std::to_string(num_nodes) + ")");
    }
    if (e.i == e.j) {
      throw Error(ErrorCode::kInvalidEdge,
                  "self-loop at node " + std::to_string(e.i));
    }
    if (e.inlier_count && *e.inlier_count < 0) {
      throw Error(ErrorCode::kInvalidEdge, "negative inlier count");
    }
    if (e.i > e.j) {
      std::swap(e.i, e.j);
      e.rel = e.rel.inverse();
    }
  }
  std::sort(edges.begin(), edges.end(), [](const RelEdge& a, const RelEdge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
      throw Error(ErrorCode::kDuplicateConstraint,
                  "duplicate constraint between nodes " +
                      std::to_string(edges[k].i) + " and " +
                      std::to_string(edges[k].j));
    }
  }
  if (!ground_truth.empty() &&
      ground_truth.size() != static_cast<std::size_t>(num_nodes)) {
    throw Error(ErrorCode::kInvalidArgument,
                "ground truth size does not match node count");
  }

  ViewGraph g;
  g.num_nodes_ = num_nodes;
  g.edges_ = std::move(edges);
  g.ground_truth_ = std::move(ground_truth);
  g.ground_truth_.resize(num_nodes);
  g.original_ids_.resize(num_nodes);
  std::iota(g.original_ids_.begin(), g.original_ids_.end(), 0);
  g.Index();
  return g;
}

void ViewGraph::Index() {
  std::vector<int> deg(num_nodes_, 0);
  for (const RelEdge& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  adj_offsets_.assign(num_nodes_ + 1, 0);
  for (int v = 0; v < num_nodes_; ++v) {
    adj_offsets_[v + 1] = adj_offsets_[v] + deg[v];
  }
  adj_nodes_.assign(adj_offsets_.back(), 0);
  adj_edges_.assign(adj_offsets_.back(), 0);
  std::vector<int> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  // Edges are sorted by (i, j), so appending in edge order leaves every
  // neighbor list sorted: for node v, entries from edges (u, v) with u < v
  // arrive before those from (v, w) with w > v, each group ascending.
  for (EdgeId k = 0; k < num_edges(); ++k) {
    const RelEdge& e = edges_[k];
    adj_nodes_[fill[e.j]] = e.i;
    adj_edges_[fill[e.j]++] = k;
  }
  for (EdgeId k = 0; k < num_edges(); ++k) {
    const RelEdge& e = edges_[k];
    adj_nodes_[fill[e.i]] = e.j;
    adj_edges_[fill[e.i]++] = k;
  }

  component_.assign(num_nodes_, -1);
  num_components_ = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < num_nodes_; ++s) {
    if (component_[s] >= 0) continue;
    component_[s] = num_components_;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId w : neighbors(v)) {
        if (component_[w] < 0) {
          component_[w] = num_components_;
          stack.push_back(w);
        }
      }
    }
    ++num_components_;
  }
}

std::optional<EdgeId> ViewGraph::FindEdge(NodeId a, NodeId b) const {
  if (a < 0 || b < 0 || a >= num_nodes_ || b >= num_nodes_) return std::nullopt;
  const auto nb = neighbors(a);
  const auto it = std::lower_bound(nb.begin(), nb.end(), b);
  if (it == nb.end() || *it != b) return std::nullopt;
  return incident_edges(a)[it - nb.begin()];
}

Rotation ViewGraph::Relative(NodeId a, NodeId b) const {
  const auto e = FindEdge(a, b);
  if (!e) {
    throw Error(ErrorCode::kMissingConstraint,
                "no constraint between nodes " + std::to_string(a) + " and " +
                    std::to_string(b));
  }
  return Oriented(*e, a);
}

std::vector<NodeId> ViewGraph::CommonNeighbors(NodeId a, NodeId b) const {
  std::vector<NodeId> out;
  ForEachCommonNeighbor(a, b, [&](NodeId k, EdgeId, EdgeId) {
    out.push_back(k);
    return true;
  });
  return out;
}

std::vector<std::vector<NodeId>> ViewGraph::Components() const {
  std::vector<std::vector<NodeId>> out(num_components_);
  for (NodeId v = 0; v < num_nodes_; ++v) out[component_[v]].push_back(v);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() > b.size();
  });
  return out;
}

bool ViewGraph::has_ground_truth() const {
  return std::any_of(ground_truth_.begin(), ground_truth_.end(),
                     [](const auto& r) { return r.has_value(); });
}

bool ViewGraph::has_inlier_counts() const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [](const RelEdge& e) { return e.inlier_count.has_value(); });
}

ViewGraph ViewGraph::Subgraph(std::span<const NodeId> nodes) const {
  std::vector<NodeId> local(num_nodes_, -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const NodeId v = nodes[k];
    if (v < 0 || v >= num_nodes_ || local[v] >= 0) {
      throw Error(ErrorCode::kInvalidNode, "bad subgraph node list");
    }
    local[v] = static_cast<NodeId>(k);
  }
  std::vector<RelEdge> sub_edges;
  for (const RelEdge& e : edges_) {
    if (local[e.i] >= 0 && local[e.j] >= 0) {
      sub_edges.push_back({local[e.i], local[e.j], e.rel, e.inlier_count});
    }
  }
  std::vector<std::optional<Rotation>> gt;
  gt.reserve(nodes.size());
  for (NodeId v : nodes) gt.push_back(ground_truth_[v]);
  ViewGraph g = Build(static_cast<int>(nodes.size()), std::move(sub_edges),
                      std::move(gt));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    g.original_ids_[k] = original_ids_[nodes[k]];
  }
  return g;
}

ViewGraph ViewGraph::WithEdges(std::span<const EdgeId> keep) const {
  std::vector<RelEdge> kept;
  kept.reserve(keep.size());
  for (EdgeId e : keep) kept.push_back(edges_.at(e));
  ViewGraph g = Build(num_nodes_, std::move(kept), ground_truth_);
  g.original_ids_ = original_ids_;
  return g;
}

ViewGraph ViewGraph::WithMinInliers(int min_count) const {
  std::vector<EdgeId> keep;
  for (EdgeId e = 0; e < num_edges(); ++e) {
    if (edges_[e].inlier_count.value_or(0) >= min_count) keep.push_back(e);
  }
  return WithEdges(keep);
}

}  // namespace hara
