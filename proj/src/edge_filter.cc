#include "hara/edge_filter.h"

#include <cmath>

#include "hara/error.h"

namespace hara {

void FilterConfig::Validate() const {
  if (!(tau > 0.0) || !(tau < ChordalFromAngle(std::acos(-1.0)))) {
    throw Error(ErrorCode::kInvalidConfig, "tau must lie in (0, 2 sqrt 2)");
  }
}

double EdgeResidual(const ViewGraph& g, EdgeId e,
                    std::span<const Rotation> rotations) {
  const RelEdge& ed = g.edge(e);
  return ChordalDistance(ed.rel, rotations[ed.i] * rotations[ed.j].inverse());
}

FilterResult FilterEdges(const ViewGraph& g, const InitResult& init,
                         const LoopErrorSample& sample,
                         const FilterConfig& cfg) {
  cfg.Validate();
  if (static_cast<int>(init.rotations.size()) < g.num_nodes()) {
    throw Error(ErrorCode::kInvalidArgument,
                "initial rotations do not cover the graph");
  }
  FilterResult out;
  out.median_loop_error = MedianLoopError(sample);
  if (out.median_loop_error > cfg.skip_median_threshold) {
    out.skipped = true;
    out.kept.resize(g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) out.kept[e] = e;
    return out;
  }
  std::vector<std::uint8_t> in_tree(g.num_edges(), 0);
  for (const TreeEdge& t : init.tree_edges) {
    if (t.edge >= 0 && t.edge < g.num_edges()) in_tree[t.edge] = 1;
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const double r = EdgeResidual(g, e, init.rotations);
    if (r > cfg.tau && !in_tree[e]) {
      out.removed.push_back({e, g.edge(e).i, g.edge(e).j, r});
    } else {
      out.kept.push_back(e);
    }
  }
  return out;
}

}  // namespace hara
