#include "hara/sweep.h"

#include "hara/parallel.h"

namespace hara {

std::vector<SynthConfig> SweepGrid::Cells() const {
  std::vector<SynthConfig> cells;
  for (int nn : n) {
    for (double pp : p) {
      for (double sg : sigma_deg) {
        for (double qq : q) {
          SynthConfig c;
          c.n = nn;
          c.p = pp;
          c.q = qq;
          c.sigma_deg = sg;
          c.noise = noise;
          cells.push_back(c);
        }
      }
    }
  }
  return cells;
}

double FilterQuality::recall() const {
  return outliers == 0 ? 1.0 : static_cast<double>(outliers_removed) / outliers;
}

double FilterQuality::retention() const {
  return inliers == 0 ? 1.0 : static_cast<double>(inliers_kept) / inliers;
}

FilterQuality MeasureFilter(const SynthDataset& d, const SolveReport& r) {
  std::vector<std::uint8_t> removed(d.graph.num_edges(), 0);
  for (const RemovedEdge& e : r.removed) removed[e.edge] = 1;
  FilterQuality f;
  for (EdgeId e = 0; e < d.graph.num_edges(); ++e) {
    if (d.outlier[e]) {
      ++f.outliers;
      f.outliers_removed += removed[e];
    } else {
      ++f.inliers;
      f.inliers_kept += 1 - removed[e];
    }
  }
  return f;
}

double TreeOutlierFraction(const SynthDataset& d, const SolveReport& r) {
  if (r.tree_edges.empty()) return 0.0;
  int bad = 0;
  for (const TreeEdge& t : r.tree_edges) bad += d.outlier[t.edge] ? 1 : 0;
  return static_cast<double>(bad) / static_cast<double>(r.tree_edges.size());
}

SweepRow RunTrial(const SynthConfig& cell, const PipelineConfig& cfg) {
  const SynthDataset d = Generate(cell);
  const SolveReport r = Solve(d.graph, cfg);
  SweepRow row;
  row.cell = cell;
  if (r.init_metrics) {
    row.theta1_init = r.init_metrics->theta1_deg;
    row.theta2_init = r.init_metrics->theta2_deg;
  }
  if (r.final_metrics) {
    row.theta1 = r.final_metrics->theta1_deg;
    row.theta2 = r.final_metrics->theta2_deg;
  }
  row.times = r.times;
  row.filter_skipped = !r.components.empty() && r.components.front().filter_skipped;
  row.edges_removed = static_cast<int>(r.removed.size());
  row.filter = MeasureFilter(d, r);
  row.tree_outlier_fraction = TreeOutlierFraction(d, r);
  return row;
}

std::vector<SweepRow> RunSweep(const SweepGrid& grid, const PipelineConfig& cfg,
                               int threads) {
  const auto cells = grid.Cells();
  const int total = static_cast<int>(cells.size()) * grid.trials;
  std::vector<SweepRow> rows(total);
  ParallelFor(total, threads, [&](int k) {
    SynthConfig cell = cells[k / grid.trials];
    cell.seed = grid.base_seed + static_cast<std::uint64_t>(k % grid.trials);
    rows[k] = RunTrial(cell, cfg);
  });
  return rows;
}

void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "n,p,q,sigma_deg,seed,theta1_init_deg,theta2_init_deg,theta1_deg,"
         "theta2_deg,t_thresholds_s,t_init_s,t_filter_s,t_refine_s,"
         "filter_skipped,edges_removed,filter_recall,filter_retention,"
         "tree_outlier_fraction\n";
  const auto old = out.precision(10);
  for (const SweepRow& r : rows) {
    out << r.cell.n << ',' << r.cell.p << ',' << r.cell.q << ','
        << r.cell.sigma_deg << ',' << r.cell.seed << ',' << r.theta1_init << ','
        << r.theta2_init << ',' << r.theta1 << ',' << r.theta2 << ','
        << r.times.thresholds << ',' << r.times.init << ',' << r.times.filter
        << ',' << r.times.refine << ',' << (r.filter_skipped ? 1 : 0) << ','
        << r.edges_removed << ',' << r.filter.recall() << ','
        << r.filter.retention() << ',' << r.tree_outlier_fraction << '\n';
  }
  out.precision(old);
}

}  // namespace hara
