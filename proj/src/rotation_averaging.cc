#include "hara/rotation_averaging.h"

#include <algorithm>
#include <numeric>

#include <Eigen/SVD>

#include "hara/error.h"

namespace hara {
namespace {

constexpr double kWeiszfeldFloor = 1e-9;

void RequireNonEmpty(std::span<const Rotation> rs) {
  if (rs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot average an empty set");
  }
}

Rotation Weiszfeld(std::span<const Rotation> rs, const SraConfig& cfg,
                   AveragingStats* stats) {
  Rotation current = ChordalL2Mean(rs);
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    Eigen::Vector3d num = Eigen::Vector3d::Zero();
    double den = 0.0;
    for (const Rotation& r : rs) {
      const Eigen::Vector3d v = Log(r * current.inverse());
      const double w = 1.0 / std::max(v.norm(), kWeiszfeldFloor);
      num += w * v;
      den += w;
    }
    const Eigen::Vector3d step = num / den;
    current = Exp(step) * current;
    if (stats) stats->objective.push_back(SumAngularDistances(rs, current));
    if (step.norm() < cfg.tol) {
      ++it;
      break;
    }
  }
  if (stats) stats->iterations += it;
  return current;
}

}  // namespace

double SumAngularDistances(std::span<const Rotation> rs, const Rotation& c) {
  double s = 0.0;
  for (const Rotation& r : rs) s += AngularDistance(r, c);
  return s;
}

double SumSquaredAngularDistances(std::span<const Rotation> rs,
                                  const Rotation& c) {
  double s = 0.0;
  for (const Rotation& r : rs) {
    const double d = AngularDistance(r, c);
    s += d * d;
  }
  return s;
}

Rotation ChordalL2Mean(std::span<const Rotation> rs) {
  RequireNonEmpty(rs);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (const Rotation& r : rs) sum += r.matrix();
  if (sum.norm() < 1e-12) return rs.front();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(sum,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Eigen::Matrix3d m = svd.matrixU() * d * svd.matrixV().transpose();
  return Rotation::FromQuaternion(Eigen::Quaterniond(m));
}

Rotation GeodesicL1Mean(std::span<const Rotation> rs, const SraConfig& cfg,
                        AveragingStats* stats) {
  RequireNonEmpty(rs);
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::kInvalidConfig, "tol must be > 0");
  if (stats) *stats = AveragingStats{};
  Rotation mean = Weiszfeld(rs, cfg, stats);

  std::vector<int> kept(rs.size());
  std::iota(kept.begin(), kept.end(), 0);
  if (cfg.outlier_rejection && rs.size() > 2) {
    std::vector<double> res(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      res[i] = ChordalDistance(rs[i], mean);
    }
    std::vector<double> sorted = res;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double gate = std::max(cfg.gate_factor * median, cfg.gate_floor);
    std::vector<Rotation> inliers;
    kept.clear();
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (res[i] <= gate) {
        kept.push_back(static_cast<int>(i));
        inliers.push_back(rs[i]);
      }
    }
    if (!inliers.empty() && inliers.size() < rs.size()) {
      mean = Weiszfeld(inliers, cfg, stats);
    } else if (inliers.empty()) {
      kept.resize(rs.size());
      std::iota(kept.begin(), kept.end(), 0);
    }
  }
  if (stats) stats->kept = std::move(kept);
  return mean;
}

Rotation GeodesicL2Mean(std::span<const Rotation> rs, const SraConfig& cfg,
                        AveragingStats* stats) {
  RequireNonEmpty(rs);
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::kInvalidConfig, "tol must be > 0");
  if (stats) *stats = AveragingStats{};
  Rotation current = ChordalL2Mean(rs);
  double objective = SumSquaredAngularDistances(rs, current);
  const double inv_n = 1.0 / static_cast<double>(rs.size());
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (const Rotation& r : rs) step += Log(r * current.inverse());
    step *= inv_n;
    Rotation next = Exp(step) * current;
    double next_objective = SumSquaredAngularDistances(rs, next);
    for (int halvings = 0;
         next_objective > objective && halvings < 40; ++halvings) {
      step *= 0.5;
      next = Exp(step) * current;
      next_objective = SumSquaredAngularDistances(rs, next);
    }
    if (next_objective > objective) {
      ++it;
      break;
    }
    current = next;
    objective = next_objective;
    if (stats) stats->objective.push_back(objective);
    if (step.norm() < cfg.tol) {
      ++it;
      break;
    }
  }
  if (stats) {
    stats->iterations = it;
    stats->kept.resize(rs.size());
    std::iota(stats->kept.begin(), stats->kept.end(), 0);
  }
  return current;
}

}  // namespace hara
