#pragma once

#include <span>
#include <vector>

#include "hara/so3.h"

namespace hara {

struct SraConfig {
  int max_iters = 100;
  double tol = 1e-7;  // radians, on the update step
  // L1 only: after convergence drop inputs whose chordal residual exceeds
  // max(gate_factor * median residual, gate_floor) and re-run once.
  bool outlier_rejection = false;
  double gate_factor = 2.0;
  double gate_floor = 0.35;
};

struct AveragingStats {
  int iterations = 0;
  // Objective value after each iteration (sum of distances for L1, sum of
  // squared distances for L2).
  std::vector<double> objective;
  // Inputs retained by the outlier gate (all of them when gating is off).
  std::vector<int> kept;
};

// Orthogonal polar factor (det +1) of the summed rotation matrices.
Rotation ChordalL2Mean(std::span<const Rotation> rs);

// Weiszfeld iteration for the geodesic L1 median, started at the chordal L2
// mean. Throws kInvalidArgument on empty input.
Rotation GeodesicL1Mean(std::span<const Rotation> rs, const SraConfig& cfg = {},
                        AveragingStats* stats = nullptr);

// Karcher mean (geodesic L2), started at the chordal L2 mean. A step that
// would raise the objective is halved until it does not.
Rotation GeodesicL2Mean(std::span<const Rotation> rs, const SraConfig& cfg = {},
                        AveragingStats* stats = nullptr);

double SumAngularDistances(std::span<const Rotation> rs, const Rotation& c);
double SumSquaredAngularDistances(std::span<const Rotation> rs,
                                  const Rotation& c);

}  // namespace hara
