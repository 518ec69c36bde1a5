#include "hara/metrics.h"

#include <cmath>
#include <numbers>

#include "hara/error.h"

namespace hara {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

}  // namespace

double MeanErrorAt(std::span<const Rotation> est, std::span<const Rotation> gt,
                   const Rotation& align) {
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sum += AngularDistance(gt[i], est[i] * align);
  }
  return sum / static_cast<double>(est.size());
}

double RmsErrorAt(std::span<const Rotation> est, std::span<const Rotation> gt,
                  const Rotation& align) {
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = AngularDistance(gt[i], est[i] * align);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(est.size()));
}

MetricsResult Evaluate(std::span<const std::optional<Rotation>> est,
                       std::span<const std::optional<Rotation>> gt,
                       const SraConfig& cfg) {
  std::vector<Rotation> e;
  std::vector<Rotation> g;
  std::vector<Rotation> q;
  const std::size_t n = std::min(est.size(), gt.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!est[i] || !gt[i]) continue;
    e.push_back(*est[i]);
    g.push_back(*gt[i]);
    q.push_back(est[i]->inverse() * *gt[i]);
  }
  if (q.empty()) {
    throw Error(ErrorCode::kNoOverlap,
                "no node has both an estimate and a ground truth rotation");
  }
  MetricsResult m;
  m.n_evaluated = static_cast<int>(q.size());
  m.r_align_l1 = GeodesicL1Mean(q, cfg);
  m.r_align_l2 = GeodesicL2Mean(q, cfg);
  m.theta1_deg = kDeg * MeanErrorAt(e, g, m.r_align_l1);
  m.theta2_deg = kDeg * RmsErrorAt(e, g, m.r_align_l2);
  return m;
}

MetricsResult Evaluate(std::span<const Rotation> est,
                       std::span<const std::optional<Rotation>> gt,
                       const SraConfig& cfg) {
  std::vector<std::optional<Rotation>> wrapped(est.begin(), est.end());
  return Evaluate(std::span<const std::optional<Rotation>>(wrapped), gt, cfg);
}

}  // namespace hara
