#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hara/edge_filter.h"
#include "hara/hierarchical_init.h"
#include "hara/metrics.h"
#include "hara/refine.h"
#include "hara/triplet.h"
#include "hara/view_graph.h"

namespace hara {

struct PipelineConfig {
  InitConfig init;
  // Pick loop thresholds from sampled loop errors; otherwise init.eps is used.
  bool auto_thresholds = true;
  SamplingOptions sampling;
  ThresholdOptions thresholds;
  FilterConfig filter;
  bool filter_enabled = true;
  RefineConfig refine;
  bool refine_enabled = true;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct StageTimes {
  double thresholds = 0.0;
  double init = 0.0;
  double filter = 0.0;
  double refine = 0.0;
  double evaluate = 0.0;

  StageTimes& operator+=(const StageTimes& o);
};

struct ComponentReport {
  std::vector<NodeId> nodes;  // ids in the input graph
  int num_edges = 0;
  LoopThresholds eps;
  double median_loop_error = 0.0;
  int num_pooled_errors = 0;
  int tree_edges = 0;
  std::vector<NodeId> roots;  // input ids
  bool filter_skipped = false;
  int edges_removed = 0;
  int refine_iterations = 0;
  bool refine_converged = false;
  double refine_max_step_after_first = 0.0;
  bool refine_monotone = true;
  std::optional<MetricsResult> init_metrics;
  std::optional<MetricsResult> final_metrics;
  StageTimes times;
  std::vector<TraceEvent> trace;          // local ids
  std::vector<RefineIteration> refine_log;
};

struct SolveReport {
  std::vector<ComponentReport> components;  // largest first
  std::vector<Rotation> init_rotations;     // per input node
  std::vector<Rotation> rotations;          // per input node, final
  std::vector<RemovedEdge> removed;         // input edge ids and node ids
  std::vector<TreeEdge> tree_edges;         // input ids
  // Metrics of the largest component (each component has its own gauge).
  std::optional<MetricsResult> init_metrics;
  std::optional<MetricsResult> final_metrics;
  StageTimes times;
  bool partial = false;   // refinement failed; rotations are the initial ones
  std::string error;
};

// thresholds -> hierarchical init -> edge filter -> refinement -> metrics,
// independently per connected component.
SolveReport Solve(const ViewGraph& g, const PipelineConfig& cfg,
                  std::ostream* verbose = nullptr);

struct ReportOptions {
  bool include_trace = false;
  bool include_timings = true;
};

// JSON rendering of the report and the configuration that produced it.
std::string ReportToJson(const SolveReport& report, const PipelineConfig& cfg,
                         const ReportOptions& options = {});

// Removed-edge CSV: i,j,residual.
void WriteRemovedCsv(const SolveReport& report, std::ostream& out);

}  // namespace hara
