#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hara/view_graph.h"

namespace hara {

enum class RefineLoss { kL1_2, kL1, kL2 };

const char* RefineLossName(RefineLoss loss);

struct RefineConfig {
  RefineLoss loss = RefineLoss::kL1_2;
  int max_iters = 100;
  double step_tol = 1e-5;       // on the mean update norm, radians
  double irls_delta = 1e-5;     // residual floor inside the weights
  int warmup_l1_iters = 5;      // L1 weights before switching to `loss`
  double descent_tol = 1e-9;    // allowed objective increase per iteration
  int max_halvings = 30;
  double solve_tol = 1e-10;     // relative residual of the linear solve

  void Validate() const;
};

struct RefineIteration {
  int iteration = 0;
  RefineLoss loss = RefineLoss::kL1_2;
  double objective_before = 0.0;
  double objective_after = 0.0;
  double mean_step = 0.0;
  double max_step = 0.0;
  int halvings = 0;
};

struct RefineResult {
  std::vector<Rotation> rotations;
  std::vector<RefineIteration> log;
  bool converged = false;
};

// Log(R_j^T R_jk R_k) for edge e = (j, k).
RotationVector EdgeLogResidual(const ViewGraph& g, EdgeId e,
                               std::span<const Rotation> rotations);

// Robust objective sum rho(||r_e||) over all edges.
double RobustObjective(const ViewGraph& g, std::span<const Rotation> rotations,
                       RefineLoss loss);

// IRLS on the linearized constraints Log(R_j^T R_jk R_k) = du_j - du_k,
// updating R_i <- R_i Exp(du_i). One node per connected component has its
// update pinned to zero: the first entry of `anchors` lying in that
// component, else the component's smallest id. Throws kNumericalFailure if a
// linear solve misses cfg.solve_tol.
RefineResult Refine(const ViewGraph& g, std::span<const Rotation> init,
                    std::span<const NodeId> anchors, const RefineConfig& cfg = {},
                    std::ostream* verbose = nullptr);

}  // namespace hara
