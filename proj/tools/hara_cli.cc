// Command-line driver: solve, synth, sweep, eval.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hara/error.h"
#include "hara/graph_io.h"
#include "hara/metrics.h"
#include "hara/parallel.h"
#include "hara/pipeline.h"
#include "hara/sweep.h"
#include "hara/synthetic.h"
#include "json.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw hara::Error(hara::ErrorCode::kIoError, "cannot write " + path);
  return out;
}

nlohmann::json MetricsJson(const hara::MetricsResult& m) {
  return {{"theta1_deg", m.theta1_deg},
          {"theta2_deg", m.theta2_deg},
          {"n_evaluated", m.n_evaluated}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical robust rotation averaging"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Run init -> filter -> refine on a graph file");
  std::string input;
  std::string report_path;
  std::string rotations_path;
  std::string removed_path;
  std::string mode = "full";
  bool use_inliers = false;
  bool trace = false;
  bool verbose = false;
  bool no_timings = false;
  bool no_filter = false;
  double tau = 1.0;
  int s_init = 10;
  std::vector<double> eps;
  solve->add_option("--input", input, "Graph file")->required();
  solve->add_option("--out", report_path, "JSON report path");
  solve->add_option("--rotations", rotations_path, "Write estimated rotations (G records)");
  solve->add_option("--removed-csv", removed_path, "Write removed edges as CSV");
  solve->add_flag("--use-inliers", use_inliers, "Use inlier-count tiers");
  solve->add_option("--tau", tau, "Edge filter chordal threshold");
  solve->add_option("--s-init", s_init, "Initial support threshold");
  solve->add_option("--eps", eps, "Fixed loop thresholds (disables auto selection)");
  solve->add_option("--mode", mode, "full | simplified")
      ->check(CLI::IsMember({"full", "simplified"}));
  solve->add_flag("--trace", trace, "Print the initializer trace to stdout");
  solve->add_flag("--verbose", verbose, "Per-iteration refinement log on stderr");
  solve->add_flag("--no-timings", no_timings, "Omit wall-clock fields from the report");
  solve->add_flag("--no-filter", no_filter, "Skip the edge filter");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic graph");
  hara::SynthConfig sc;
  std::string synth_out;
  std::string labels_out;
  std::string noise = "axis-angle";
  synth->add_option("--n", sc.n, "Node count");
  synth->add_option("--p", sc.p, "Edge fraction");
  synth->add_option("--q", sc.q, "Outlier fraction");
  synth->add_option("--sigma", sc.sigma_deg, "Noise std (degrees)");
  synth->add_option("--seed", sc.seed, "RNG seed");
  synth->add_option("--noise", noise, "axis-angle | isotropic")
      ->check(CLI::IsMember({"axis-angle", "isotropic"}));
  synth->add_option("--out", synth_out, "Graph output path")->required();
  synth->add_option("--labels", labels_out, "Label file (default: <out>.labels)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over synthetic settings");
  std::string sweep_config;
  std::string sweep_out;
  int trials = 0;
  sweep->add_option("--config", sweep_config, "Sweep config file")->required();
  sweep->add_option("--trials", trials, "Trials per cell (overrides the file)");
  sweep->add_option("--out", sweep_out, "CSV output path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Compare estimated and ground-truth rotations");
  std::string est_path;
  std::string gt_path;
  eval->add_option("--est", est_path, "Estimated rotations (G records)")->required();
  eval->add_option("--gt", gt_path, "Ground truth rotations (G records)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*solve) {
      const hara::ViewGraph g = hara::LoadGraph(input);
      hara::PipelineConfig cfg;
      cfg.init.mode = mode == "full" ? hara::InitMode::kFull : hara::InitMode::kSimplified;
      cfg.init.s_init = s_init;
      cfg.init.use_inlier_counts = use_inliers;
      cfg.filter.tau = tau;
      cfg.filter_enabled = !no_filter;
      if (!eps.empty()) {
        cfg.auto_thresholds = false;
        cfg.init.eps.eps = eps;
      } else if (cfg.init.mode == hara::InitMode::kSimplified) {
        cfg.thresholds.count = 1;
      }
      const hara::SolveReport report =
          hara::Solve(g, cfg, verbose ? &std::cerr : nullptr);
      if (trace) {
        for (const auto& c : report.components) hara::WriteTrace(c.trace, std::cout);
      }
      const std::string json = hara::ReportToJson(
          report, cfg, {.include_trace = trace, .include_timings = !no_timings});
      if (report_path.empty()) {
        if (!trace) std::cout << json << '\n';
      } else {
        OpenOut(report_path) << json << '\n';
      }
      if (!rotations_path.empty()) {
        std::vector<std::optional<hara::Rotation>> est(report.rotations.begin(),
                                                      report.rotations.end());
        auto out = OpenOut(rotations_path);
        hara::WriteRotations(est, out);
      }
      if (!removed_path.empty()) {
        auto out = OpenOut(removed_path);
        hara::WriteRemovedCsv(report, out);
      }
      if (report.partial) {
        std::cerr << "refinement failed: " << report.error << '\n';
        return kExitNumerical;
      }
    } else if (*synth) {
      sc.noise = noise == "isotropic" ? hara::NoiseModel::kIsotropic
                                      : hara::NoiseModel::kAxisAngle;
      const hara::SynthDataset d = hara::Generate(sc);
      hara::SaveGraph(d.graph, synth_out);
      auto labels = OpenOut(labels_out.empty() ? synth_out + ".labels" : labels_out);
      hara::WriteLabels(d, labels);
    } else if (*sweep) {
      hara::SweepFile f = hara::LoadSweepConfig(sweep_config);
      if (trials > 0) f.grid.trials = trials;
      hara::PipelineConfig cfg;
      if (f.tau) cfg.filter.tau = *f.tau;
      if (f.s_init) cfg.init.s_init = *f.s_init;
      const auto rows = hara::RunSweep(f.grid, cfg, hara::ThreadCountFromEnv());
      auto out = OpenOut(sweep_out);
      hara::WriteSweepCsv(rows, out);
    } else if (*eval) {
      const auto est = hara::LoadRotations(est_path);
      const auto gt = hara::LoadRotations(gt_path);
      const hara::MetricsResult m = hara::Evaluate(est, gt);
      std::cout << MetricsJson(m).dump(2) << '\n';
    }
  } catch (const hara::Error& e) {
    std::cerr << "error (" << hara::ErrorCodeName(e.code()) << "): " << e.what() << '\n';
    return e.code() == hara::ErrorCode::kNumericalFailure ? kExitNumerical : kExitInput;
  }
  return 0;
}
