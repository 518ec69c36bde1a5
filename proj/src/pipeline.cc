#include "hara/pipeline.h"

#include <chrono>
#include <iomanip>
#include <limits>

#include "hara/error.h"
#include "json.hpp"

namespace hara {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::optional<MetricsResult> MaybeEvaluate(const ViewGraph& g,
                                           const std::vector<Rotation>& est) {
  if (!g.has_ground_truth()) return std::nullopt;
  return Evaluate(std::span<const Rotation>(est), g.ground_truth());
}

nlohmann::json MetricsJson(const std::optional<MetricsResult>& m) {
  if (!m) return nullptr;
  const auto q = [](const Rotation& r) {
    const auto& c = r.quaternion();
    return nlohmann::json::array({c.w(), c.x(), c.y(), c.z()});
  };
  return {{"theta1_deg", m->theta1_deg},
          {"theta2_deg", m->theta2_deg},
          {"n_evaluated", m->n_evaluated},
          {"r_align_l1", q(m->r_align_l1)},
          {"r_align_l2", q(m->r_align_l2)}};
}

nlohmann::json TimesJson(const StageTimes& t) {
  return {{"thresholds_s", t.thresholds},
          {"init_s", t.init},
          {"filter_s", t.filter},
          {"refine_s", t.refine},
          {"evaluate_s", t.evaluate}};
}

const char* ModeName(InitMode m) {
  return m == InitMode::kFull ? "full" : "simplified";
}

}  // namespace

void PipelineConfig::Validate() const {
  if (!auto_thresholds) init.eps.Validate();
  if (init.s_init < 1) throw Error(ErrorCode::kInvalidConfig, "s_init must be >= 1");
  filter.Validate();
  refine.Validate();
}

StageTimes& StageTimes::operator+=(const StageTimes& o) {
  thresholds += o.thresholds;
  init += o.init;
  filter += o.filter;
  refine += o.refine;
  evaluate += o.evaluate;
  return *this;
}

SolveReport Solve(const ViewGraph& g, const PipelineConfig& cfg,
                  std::ostream* verbose) {
  cfg.Validate();
  SolveReport report;
  report.init_rotations.assign(g.num_nodes(), Rotation::Identity());
  report.rotations.assign(g.num_nodes(), Rotation::Identity());

  for (const std::vector<NodeId>& nodes : g.Components()) {
    ComponentReport comp;
    comp.nodes = nodes;
    const ViewGraph sub = g.Subgraph(nodes);
    comp.num_edges = sub.num_edges();

    auto t0 = Clock::now();
    SamplingOptions sampling = cfg.sampling;
    const LoopErrorSample sample = SampleLoopErrors(sub, sampling);
    comp.median_loop_error = MedianLoopError(sample);
    comp.num_pooled_errors = static_cast<int>(sample.pooled.size());
    InitConfig init_cfg = cfg.init;
    if (cfg.auto_thresholds) init_cfg.eps = PickThresholds(sample, cfg.thresholds);
    comp.eps = init_cfg.eps;
    comp.times.thresholds = Since(t0);

    t0 = Clock::now();
    const InitResult init = Initialize(sub, init_cfg);
    comp.times.init = Since(t0);
    comp.tree_edges = static_cast<int>(init.tree_edges.size());
    comp.trace = init.trace;
    for (NodeId r : init.roots) comp.roots.push_back(nodes[r]);
    for (const TreeEdge& t : init.tree_edges) {
      const NodeId a = nodes[t.parent];
      const NodeId b = nodes[t.child];
      report.tree_edges.push_back({a, b, *g.FindEdge(a, b)});
    }

    t0 = Clock::now();
    comp.init_metrics = MaybeEvaluate(sub, init.rotations);
    comp.times.evaluate = Since(t0);

    t0 = Clock::now();
    FilterResult filtered;
    if (cfg.filter_enabled) {
      filtered = FilterEdges(sub, init, sample, cfg.filter);
    } else {
      filtered.median_loop_error = comp.median_loop_error;
      for (EdgeId e = 0; e < sub.num_edges(); ++e) filtered.kept.push_back(e);
    }
    comp.filter_skipped = filtered.skipped;
    comp.edges_removed = static_cast<int>(filtered.removed.size());
    for (const RemovedEdge& r : filtered.removed) {
      const NodeId a = nodes[r.i];
      const NodeId b = nodes[r.j];
      report.removed.push_back({*g.FindEdge(a, b), a, b, r.residual});
    }
    comp.times.filter = Since(t0);

    std::vector<Rotation> final_rotations = init.rotations;
    t0 = Clock::now();
    if (cfg.refine_enabled) {
      try {
        const ViewGraph kept = sub.WithEdges(filtered.kept);
        RefineResult refined =
            Refine(kept, init.rotations, init.roots, cfg.refine, verbose);
        final_rotations = std::move(refined.rotations);
        comp.refine_iterations = static_cast<int>(refined.log.size());
        comp.refine_converged = refined.converged;
        for (std::size_t k = 0; k < refined.log.size(); ++k) {
          const RefineIteration& it = refined.log[k];
          if (k > 0) {
            comp.refine_max_step_after_first =
                std::max(comp.refine_max_step_after_first, it.max_step);
          }
          if (it.objective_after > it.objective_before + cfg.refine.descent_tol) {
            comp.refine_monotone = false;
          }
        }
        comp.refine_log = std::move(refined.log);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumericalFailure) throw;
        report.partial = true;
        report.error = e.what();
      }
    }
    comp.times.refine = Since(t0);

    t0 = Clock::now();
    comp.final_metrics = MaybeEvaluate(sub, final_rotations);
    comp.times.evaluate += Since(t0);

    for (std::size_t k = 0; k < nodes.size(); ++k) {
      report.init_rotations[nodes[k]] = init.rotations[k];
      report.rotations[nodes[k]] = final_rotations[k];
    }
    report.times += comp.times;
    report.components.push_back(std::move(comp));
  }
  if (!report.components.empty()) {
    report.init_metrics = report.components.front().init_metrics;
    report.final_metrics = report.components.front().final_metrics;
  }
  return report;
}

std::string ReportToJson(const SolveReport& report, const PipelineConfig& cfg,
                         const ReportOptions& options) {
  using nlohmann::json;
  json j;
  j["config"] = {
      {"mode", ModeName(cfg.init.mode)},
      {"s_init", cfg.init.s_init},
      {"use_inlier_counts", cfg.init.use_inlier_counts},
      {"inlier_tiers", cfg.init.inlier_tiers},
      {"auto_thresholds", cfg.auto_thresholds},
      {"eps", cfg.init.eps.eps},
      {"sn_refresh", cfg.init.sn_refresh == SnRefresh::kLazy ? "lazy" : "stale"},
      {"tau", cfg.filter.tau},
      {"skip_median_threshold", cfg.filter.skip_median_threshold},
      {"filter_enabled", cfg.filter_enabled},
      {"refine_enabled", cfg.refine_enabled},
      {"refine",
       {{"loss", RefineLossName(cfg.refine.loss)},
        {"max_iters", cfg.refine.max_iters},
        {"step_tol", cfg.refine.step_tol},
        {"irls_delta", cfg.refine.irls_delta},
        {"warmup_l1_iters", cfg.refine.warmup_l1_iters}}},
      {"seed", cfg.seed}};

  json stages = json::array();
  stages.push_back({{"stage", "init"}, {"metrics", MetricsJson(report.init_metrics)}});
  stages.push_back({{"stage", "filter+refine"},
                    {"metrics", MetricsJson(report.final_metrics)}});
  j["stages"] = stages;

  json comps = json::array();
  for (const ComponentReport& c : report.components) {
    json cj = {
        {"num_nodes", c.nodes.size()},
        {"num_edges", c.num_edges},
        {"roots", c.roots},
        {"loop_thresholds", c.eps.eps},
        {"median_loop_error", c.median_loop_error},
        {"num_pooled_errors", c.num_pooled_errors},
        {"tree_edges", c.tree_edges},
        {"filter", {{"skipped", c.filter_skipped}, {"removed", c.edges_removed}}},
        {"refine",
         {{"iterations", c.refine_iterations},
          {"converged", c.refine_converged},
          {"monotone", c.refine_monotone},
          {"max_step_after_first", c.refine_max_step_after_first}}},
        {"init_metrics", MetricsJson(c.init_metrics)},
        {"final_metrics", MetricsJson(c.final_metrics)}};
    if (c.median_loop_error == std::numeric_limits<double>::infinity()) {
      cj["median_loop_error"] = "inf";
    }
    if (options.include_timings) cj["times"] = TimesJson(c.times);
    if (options.include_trace) {
      json tr = json::array();
      for (const TraceEvent& e : c.trace) tr.push_back(FormatTraceEvent(e));
      cj["trace"] = tr;
    }
    comps.push_back(cj);
  }
  j["components"] = comps;
  j["edges_removed"] = report.removed.size();
  j["partial"] = report.partial;
  if (report.partial) j["error"] = report.error;
  if (options.include_timings) j["times"] = TimesJson(report.times);
  return j.dump(2);
}

void WriteRemovedCsv(const SolveReport& report, std::ostream& out) {
  out << "i,j,residual\n";
  const auto old = out.precision(17);
  for (const RemovedEdge& r : report.removed) {
    out << r.i << ',' << r.j << ',' << r.residual << '\n';
  }
  out.precision(old);
}

}  // namespace hara
