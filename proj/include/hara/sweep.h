#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hara/pipeline.h"
#include "hara/synthetic.h"

namespace hara {

struct SweepGrid {
  std::vector<int> n = {100};
  std::vector<double> p = {0.5};
  std::vector<double> q = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> sigma_deg = {5.0};
  int trials = 10;
  std::uint64_t base_seed = 0;  // trial t uses seed base_seed + t
  NoiseModel noise = NoiseModel::kAxisAngle;

  std::vector<SynthConfig> Cells() const;
};

struct FilterQuality {
  int outliers = 0;
  int outliers_removed = 0;
  int inliers = 0;
  int inliers_kept = 0;

  double recall() const;     // removed outliers / outliers (1 if none)
  double retention() const;  // kept inliers / inliers (1 if none)
};

FilterQuality MeasureFilter(const SynthDataset& d, const SolveReport& r);

// Fraction of spanning-tree edges that are injected outliers.
double TreeOutlierFraction(const SynthDataset& d, const SolveReport& r);

struct SweepRow {
  SynthConfig cell;
  double theta1_init = 0.0;
  double theta2_init = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  StageTimes times;
  bool filter_skipped = false;
  int edges_removed = 0;
  FilterQuality filter;
  double tree_outlier_fraction = 0.0;
};

SweepRow RunTrial(const SynthConfig& cell, const PipelineConfig& cfg);

// Rows ordered by cell (n, p, q, sigma nesting as listed) then trial.
std::vector<SweepRow> RunSweep(const SweepGrid& grid, const PipelineConfig& cfg,
                               int threads);

void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out);

// Flat "key = value" file: n, p, q, sigma (numbers or [lists]), trials, seed,
// noise ("axis-angle" | "isotropic"), tau, s_init. '#' starts a comment.
struct SweepFile {
  SweepGrid grid;
  std::optional<double> tau;
  std::optional<int> s_init;
};
SweepFile ParseSweepConfig(const std::string& text);
SweepFile LoadSweepConfig(const std::string& path);

}  // namespace hara
