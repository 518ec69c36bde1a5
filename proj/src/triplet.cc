#include "hara/triplet.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hara/error.h"

namespace hara {

void LoopThresholds::Validate() const {
  if (eps.empty()) throw Error(ErrorCode::kInvalidConfig, "no loop thresholds");
  const double cap = ChordalFromAngle(std::acos(-1.0));
  for (std::size_t y = 0; y < eps.size(); ++y) {
    if (!(eps[y] > 0.0) || !(eps[y] < cap)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "loop threshold " + std::to_string(eps[y]) +
                      " outside (0, 2 sqrt 2)");
    }
    if (y > 0 && !(eps[y] > eps[y - 1])) {
      throw Error(ErrorCode::kInvalidConfig,
                  "loop thresholds must be strictly ascending");
    }
  }
}

double LoopError(const Rotation& r_ij, const Rotation& r_ik,
                 const Rotation& r_kj) {
  return ChordalDistance(r_ij, r_ik * r_kj);
}

double LoopError(const ViewGraph& g, NodeId i, NodeId j, NodeId k) {
  return LoopError(g.Relative(i, j), g.Relative(i, k), g.Relative(k, j));
}

double LoopErrorFromEdges(const ViewGraph& g, NodeId base, NodeId cand,
                          NodeId k, EdgeId e_bc, EdgeId e_bk, EdgeId e_ck) {
  (void)cand;
  return LoopError(g.Oriented(e_bc, base), g.Oriented(e_bk, base),
                   g.Oriented(e_ck, k));
}

int CountTripletSupports(const ViewGraph& g, NodeId base, NodeId cand,
                         double eps) {
  const auto e_bc = g.FindEdge(base, cand);
  if (!e_bc) {
    throw Error(ErrorCode::kMissingConstraint,
                "nodes " + std::to_string(base) + " and " +
                    std::to_string(cand) + " are not adjacent");
  }
  int supports = 0;
  g.ForEachCommonNeighbor(base, cand, [&](NodeId k, EdgeId e_bk, EdgeId e_ck) {
    if (LoopErrorFromEdges(g, base, cand, k, *e_bc, e_bk, e_ck) < eps) {
      ++supports;
    }
    return true;
  });
  return supports;
}

LoopErrorSample SampleLoopErrors(const ViewGraph& g,
                                 const SamplingOptions& options) {
  LoopErrorSample s;
  s.per_edge.resize(g.num_edges());
  std::vector<NodeId> common;
  std::vector<NodeId> chosen;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const RelEdge& ed = g.edge(e);
    common = g.CommonNeighbors(ed.i, ed.j);
    const auto limit = static_cast<std::size_t>(options.max_triplets_per_edge);
    if (common.size() > limit) {
      if (options.random_seed) {
        std::mt19937_64 rng(*options.random_seed +
                            0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(e));
        chosen.clear();
        std::sample(common.begin(), common.end(), std::back_inserter(chosen),
                    limit, rng);
        common.swap(chosen);
      } else {
        common.resize(limit);
      }
    }
    auto& errs = s.per_edge[e];
    errs.reserve(common.size());
    for (NodeId k : common) {
      errs.push_back(LoopError(ed.rel, g.Relative(ed.i, k), g.Relative(k, ed.j)));
    }
    s.all.insert(s.all.end(), errs.begin(), errs.end());
  }
  std::sort(s.all.begin(), s.all.end());
  for (double v : s.all) {
    if (v < options.pool_cap) s.pooled.push_back(v);
  }
  return s;
}

double NearestRankPercentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "percentile of an empty set");
  }
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

LoopThresholds PickThresholds(const LoopErrorSample& sample,
                              const ThresholdOptions& options) {
  if (options.count < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one loop threshold");
  }
  LoopThresholds t;
  if (static_cast<int>(sample.pooled.size()) < options.min_pool) {
    for (int y = 0; y < options.count; ++y) {
      if (y < static_cast<int>(options.fallback.size())) {
        t.eps.push_back(options.fallback[y]);
      } else {
        const double step = options.fallback.empty() ? 0.05 : options.fallback.front();
        t.eps.push_back((t.eps.empty() ? 0.0 : t.eps.back()) + step);
      }
    }
  } else {
    for (int y = 1; y <= options.count; ++y) {
      t.eps.push_back(NearestRankPercentile(sample.pooled, 10.0 * y));
    }
  }
  // Strictly ascending and strictly positive.
  t.eps[0] = std::max(t.eps[0], options.nudge);
  for (std::size_t y = 1; y < t.eps.size(); ++y) {
    t.eps[y] = std::max(t.eps[y], t.eps[y - 1] + options.nudge);
  }
  return t;
}

double MedianLoopError(const LoopErrorSample& sample) {
  const auto& v = sample.all;
  if (v.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

SnTable::SnTable(int num_nodes, int num_thresholds, int s_init)
    : n_(num_nodes),
      m_(num_thresholds),
      s_init_(s_init),
      counts_(static_cast<std::size_t>(num_nodes) * num_thresholds * s_init, 0),
      valid_(num_nodes, 0),
      stamp_(num_nodes, 0) {}

void SnTable::Reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  std::fill(valid_.begin(), valid_.end(), 0);
  std::fill(stamp_.begin(), stamp_.end(), 0);
}

std::vector<CandidateSupports> SupportsOfNonFamily(
    const ViewGraph& g, const std::vector<std::uint8_t>& in_family,
    NodeId base, const LoopThresholds& eps) {
  std::vector<CandidateSupports> out;
  const auto nb = g.neighbors(base);
  const auto ie = g.incident_edges(base);
  for (std::size_t p = 0; p < nb.size(); ++p) {
    const NodeId c = nb[p];
    if (in_family[c]) continue;
    CandidateSupports cs{c, ie[p], std::vector<int>(eps.size(), 0)};
    g.ForEachCommonNeighbor(base, c, [&](NodeId k, EdgeId e_bk, EdgeId e_ck) {
      const double err = LoopErrorFromEdges(g, base, c, k, ie[p], e_bk, e_ck);
      for (int y = 0; y < eps.size(); ++y) {
        if (err < eps.eps[y]) ++cs.supports[y];
      }
      return true;
    });
    out.push_back(std::move(cs));
  }
  return out;
}

void SnTable::UpdateRow(const ViewGraph& g,
                        const std::vector<std::uint8_t>& in_family, NodeId base,
                        const LoopThresholds& eps, int family_size) {
  const auto cands = SupportsOfNonFamily(g, in_family, base, eps);
  for (int y = 1; y <= m_; ++y) {
    for (int z = 1; z <= s_init_; ++z) {
      int count = 0;
      for (const auto& c : cands) {
        if (c.supports[y - 1] >= z) ++count;
      }
      counts_[Index(base, y, z)] = count;
    }
  }
  valid_[base] = 1;
  stamp_[base] = family_size;
}

}  // namespace hara
