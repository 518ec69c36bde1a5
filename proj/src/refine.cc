#include "hara/refine.h"

#include <cmath>
#include <iomanip>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "hara/error.h"

namespace hara {
namespace {

double Rho(double e, RefineLoss loss) {
  switch (loss) {
    case RefineLoss::kL1_2: return std::sqrt(e);
    case RefineLoss::kL1: return e;
    case RefineLoss::kL2: return 0.5 * e * e;
  }
  return e;
}

// rho'(e) / e, with e floored at delta (constant factors dropped).
double IrlsWeight(double e, RefineLoss loss, double delta) {
  const double r = std::max(e, delta);
  switch (loss) {
    case RefineLoss::kL1_2: return std::pow(r, -1.5);
    case RefineLoss::kL1: return 1.0 / r;
    case RefineLoss::kL2: return 1.0;
  }
  return 1.0;
}

std::vector<Rotation> Apply(std::span<const Rotation> rs,
                            const Eigen::MatrixX3d& du, double scale) {
  std::vector<Rotation> out(rs.begin(), rs.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Eigen::Vector3d d = scale * du.row(i).transpose();
    if (d.squaredNorm() > 0.0) out[i] = out[i] * Exp(d);
  }
  return out;
}

}  // namespace

const char* RefineLossName(RefineLoss loss) {
  switch (loss) {
    case RefineLoss::kL1_2: return "l1/2";
    case RefineLoss::kL1: return "l1";
    case RefineLoss::kL2: return "l2";
  }
  return "?";
}

void RefineConfig::Validate() const {
  if (max_iters < 0 || !(step_tol > 0.0) || !(irls_delta > 0.0) ||
      warmup_l1_iters < 0 || !(descent_tol >= 0.0) || !(solve_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid refinement configuration");
  }
}

RotationVector EdgeLogResidual(const ViewGraph& g, EdgeId e,
                               std::span<const Rotation> rotations) {
  const RelEdge& ed = g.edge(e);
  return Log(rotations[ed.i].inverse() * ed.rel * rotations[ed.j]);
}

double RobustObjective(const ViewGraph& g, std::span<const Rotation> rotations,
                       RefineLoss loss) {
  double sum = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    sum += Rho(EdgeLogResidual(g, e, rotations).norm(), loss);
  }
  return sum;
}

RefineResult Refine(const ViewGraph& g, std::span<const Rotation> init,
                    std::span<const NodeId> anchors, const RefineConfig& cfg,
                    std::ostream* verbose) {
  cfg.Validate();
  const int n = g.num_nodes();
  if (static_cast<int>(init.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "initial rotations do not match the node count");
  }
  RefineResult out;
  out.rotations.assign(init.begin(), init.end());
  if (n == 0) {
    out.converged = true;
    return out;
  }

  // Gauge: one pinned node per component.
  std::vector<NodeId> anchor_of(g.num_components(), -1);
  for (NodeId a : anchors) {
    if (a >= 0 && a < n && anchor_of[g.component_labels()[a]] < 0) {
      anchor_of[g.component_labels()[a]] = a;
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (anchor_of[g.component_labels()[v]] < 0) anchor_of[g.component_labels()[v]] = v;
  }
  std::vector<int> column(n, -1);
  int unknowns = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (anchor_of[g.component_labels()[v]] != v) column[v] = unknowns++;
  }

  std::vector<Eigen::Vector3d> residuals(g.num_edges());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::SparseMatrix<double> lap(unknowns, unknowns);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  bool warmup = cfg.warmup_l1_iters > 0;
  int warmup_left = cfg.warmup_l1_iters;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const RefineLoss loss = warmup ? RefineLoss::kL1 : cfg.loss;
    double objective = 0.0;
    triplets.clear();
    Eigen::MatrixX3d rhs = Eigen::MatrixX3d::Zero(unknowns, 3);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      residuals[e] = EdgeLogResidual(g, e, out.rotations);
      const double norm = residuals[e].norm();
      objective += Rho(norm, loss);
      const double w = IrlsWeight(norm, loss, cfg.irls_delta);
      const int a = column[g.edge(e).i];
      const int b = column[g.edge(e).j];
      // w * (du_a - du_b - r)^2
      if (a >= 0) {
        triplets.emplace_back(a, a, w);
        rhs.row(a) += w * residuals[e].transpose();
      }
      if (b >= 0) {
        triplets.emplace_back(b, b, w);
        rhs.row(b) -= w * residuals[e].transpose();
      }
      if (a >= 0 && b >= 0) {
        triplets.emplace_back(a, b, -w);
        triplets.emplace_back(b, a, -w);
      }
    }

    Eigen::MatrixX3d du = Eigen::MatrixX3d::Zero(n, 3);
    if (unknowns > 0) {
      lap.setFromTriplets(triplets.begin(), triplets.end());
      solver.compute(lap);
      if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::kNumericalFailure,
                    "factorization of the refinement system failed");
      }
      const Eigen::MatrixX3d x = solver.solve(rhs);
      const double rhs_norm = rhs.norm();
      const double rel =
          rhs_norm > 0.0 ? (lap * x - rhs).norm() / rhs_norm : (lap * x).norm();
      if (!x.allFinite() || rel > cfg.solve_tol) {
        throw Error(ErrorCode::kNumericalFailure,
                    "refinement solve missed tolerance (relative residual " +
                        std::to_string(rel) + ")");
      }
      for (NodeId v = 0; v < n; ++v) {
        if (column[v] >= 0) du.row(v) = x.row(column[v]);
      }
    }

    RefineIteration rec;
    rec.iteration = it;
    rec.loss = loss;
    rec.objective_before = objective;
    double scale = 1.0;
    std::vector<Rotation> next = Apply(out.rotations, du, scale);
    double next_objective = RobustObjective(g, next, loss);
    while (next_objective > objective + cfg.descent_tol &&
           rec.halvings < cfg.max_halvings) {
      scale *= 0.5;
      ++rec.halvings;
      next = Apply(out.rotations, du, scale);
      next_objective = RobustObjective(g, next, loss);
    }
    const bool stalled = next_objective > objective + cfg.descent_tol;
    if (stalled) {
      scale = 0.0;
      next_objective = objective;
    } else {
      out.rotations = std::move(next);
    }
    rec.objective_after = next_objective;
    double sum_step = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      const double s = scale * du.row(v).norm();
      sum_step += s;
      rec.max_step = std::max(rec.max_step, s);
    }
    rec.mean_step = sum_step / n;
    out.log.push_back(rec);
    if (verbose) {
      *verbose << "refine iter " << it << " loss=" << RefineLossName(loss)
               << " objective=" << std::setprecision(10) << rec.objective_after
               << " mean_step=" << rec.mean_step << " halvings=" << rec.halvings
               << '\n';
    }

    if (warmup) {
      --warmup_left;
      if (warmup_left <= 0 || rec.mean_step < cfg.step_tol || stalled) {
        warmup = false;
      }
      continue;
    }
    if (rec.mean_step < cfg.step_tol || stalled) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace hara
