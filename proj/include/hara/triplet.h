#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hara/view_graph.h"

namespace hara {

// Ascending chordal loop thresholds eps_1 < ... < eps_m.
struct LoopThresholds {
  std::vector<double> eps;

  int size() const { return static_cast<int>(eps.size()); }
  // Throws kInvalidConfig unless strictly ascending inside (0, 2 sqrt 2).
  void Validate() const;
};

// d_chord(R_ij, R_ik R_kj). Throws kMissingConstraint if any edge is absent.
double LoopError(const ViewGraph& g, NodeId i, NodeId j, NodeId k);

// Same quantity from the three oriented edge rotations; no lookups.
double LoopError(const Rotation& r_ij, const Rotation& r_ik,
                 const Rotation& r_kj);

// Loop error of the triplet (base, cand, k) using edge ids from the
// adjacency: e_bc = (base, cand), e_bk = (base, k), e_ck = (cand, k).
double LoopErrorFromEdges(const ViewGraph& g, NodeId base, NodeId cand,
                          NodeId k, EdgeId e_bc, EdgeId e_bk, EdgeId e_ck);

// Number of common neighbors k of (base, cand) whose triplet closes under eps.
// Throws kMissingConstraint if (base, cand) is not an edge.
int CountTripletSupports(const ViewGraph& g, NodeId base, NodeId cand,
                         double eps);

struct SamplingOptions {
  int max_triplets_per_edge = 10;
  // Keep only errors below this value in the pooled collection.
  double pool_cap = 1.0;
  // Empty: the common neighbors with the smallest ids are used. Otherwise a
  // seeded uniform subset.
  std::optional<std::uint64_t> random_seed;
};

struct LoopErrorSample {
  // Errors per edge, aligned with g.edges().
  std::vector<std::vector<double>> per_edge;
  // Every sampled error, sorted.
  std::vector<double> all;
  // Sorted errors strictly below the pool cap.
  std::vector<double> pooled;
};

LoopErrorSample SampleLoopErrors(const ViewGraph& g,
                                 const SamplingOptions& options = {});

struct ThresholdOptions {
  int count = 3;               // m; percentiles 10, 20, ..., 10 m
  int min_pool = 30;           // below this the fallback is used
  std::vector<double> fallback = {0.05, 0.10, 0.15};
  double nudge = 1e-6;
};

// Nearest-rank percentiles of the pooled errors, made strictly ascending.
LoopThresholds PickThresholds(const LoopErrorSample& sample,
                              const ThresholdOptions& options = {});

// Median of all sampled errors; +inf if there are none.
double MedianLoopError(const LoopErrorSample& sample);

// Nearest-rank percentile (p in (0, 100]) of a sorted, non-empty range.
double NearestRankPercentile(const std::vector<double>& sorted, double p);

// n x m x s_init counts: entry (x, y, z) is the number of non-family
// neighbors of x with at least z supports under eps_y (y, z are 1-based in
// the accessors below).
class SnTable {
 public:
  SnTable() = default;
  SnTable(int num_nodes, int num_thresholds, int s_init);

  int at(NodeId x, int y, int z) const {
    return counts_[Index(x, y, z)];
  }
  int num_thresholds() const { return m_; }
  int s_init() const { return s_init_; }

  // Rows that were never computed since construction or the last Reset.
  bool row_valid(NodeId x) const { return valid_[x] != 0; }
  // Family size at the time row x was last computed.
  int row_stamp(NodeId x) const { return stamp_[x]; }

  void Reset();

  // Recomputes row `base` from the current family membership.
  void UpdateRow(const ViewGraph& g, const std::vector<std::uint8_t>& in_family,
                 NodeId base, const LoopThresholds& eps, int family_size);

 private:
  std::size_t Index(NodeId x, int y, int z) const {
    return (static_cast<std::size_t>(x) * m_ + (y - 1)) * s_init_ + (z - 1);
  }

  int n_ = 0;
  int m_ = 0;
  int s_init_ = 0;
  std::vector<int> counts_;
  std::vector<std::uint8_t> valid_;
  std::vector<int> stamp_;
};

// Support counts of every non-family neighbor c of base, for each threshold:
// result[c_pos][y-1]. Helper shared by the initializer and the SN table.
struct CandidateSupports {
  NodeId node;
  EdgeId edge;  // (base, node)
  std::vector<int> supports;  // one per threshold
};
std::vector<CandidateSupports> SupportsOfNonFamily(
    const ViewGraph& g, const std::vector<std::uint8_t>& in_family,
    NodeId base, const LoopThresholds& eps);

}  // namespace hara
