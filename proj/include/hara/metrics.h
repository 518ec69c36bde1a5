#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hara/rotation_averaging.h"
#include "hara/so3.h"

namespace hara {

struct MetricsResult {
  double theta1_deg = 0.0;  // mean error at the L1-optimal alignment
  double theta2_deg = 0.0;  // RMS error at the L2-optimal alignment
  Rotation r_align_l1;
  Rotation r_align_l2;
  int n_evaluated = 0;
};

// Mean angular error (radians) of est_i * align against gt_i.
double MeanErrorAt(std::span<const Rotation> est, std::span<const Rotation> gt,
                   const Rotation& align);
// RMS angular error (radians) of est_i * align against gt_i.
double RmsErrorAt(std::span<const Rotation> est, std::span<const Rotation> gt,
                  const Rotation& align);

// Aligns est to gt from the right. Since d(gt_i, est_i R) = d(R, est_i^T gt_i),
// each optimal alignment is a single-rotation average of Q_i = est_i^T gt_i.
// Nodes missing from either side are skipped; throws kNoOverlap when nothing
// is left.
MetricsResult Evaluate(std::span<const std::optional<Rotation>> est,
                       std::span<const std::optional<Rotation>> gt,
                       const SraConfig& cfg = {200, 1e-12, false, 2.0, 0.35});

MetricsResult Evaluate(std::span<const Rotation> est,
                       std::span<const std::optional<Rotation>> gt,
                       const SraConfig& cfg = {200, 1e-12, false, 2.0, 0.35});

}  // namespace hara
