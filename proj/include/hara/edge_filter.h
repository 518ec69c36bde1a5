#pragma once

#include <span>
#include <vector>

#include "hara/hierarchical_init.h"
#include "hara/triplet.h"
#include "hara/view_graph.h"

namespace hara {

struct FilterConfig {
  double tau = 1.0;                   // chordal
  double skip_median_threshold = 1.0; // chordal

  void Validate() const;
};

struct RemovedEdge {
  EdgeId edge;
  NodeId i;
  NodeId j;
  double residual;
};

struct FilterResult {
  std::vector<EdgeId> kept;
  std::vector<RemovedEdge> removed;
  bool skipped = false;
  double median_loop_error = 0.0;
};

// d_chord(R_jk, R_j R_k^T) for edge e under the given absolute rotations.
double EdgeResidual(const ViewGraph& g, EdgeId e,
                    std::span<const Rotation> rotations);

// Drops edges whose residual under the initial rotations exceeds tau. The
// step is skipped (everything kept) when the median sampled loop error is
// above cfg.skip_median_threshold. Spanning-tree edges are never removed.
FilterResult FilterEdges(const ViewGraph& g, const InitResult& init,
                         const LoopErrorSample& sample,
                         const FilterConfig& cfg = {});

}  // namespace hara
