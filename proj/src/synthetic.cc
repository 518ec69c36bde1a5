#include "hara/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hara/error.h"

namespace hara {

void SynthConfig::Validate() const {
  if (n < 3) throw Error(ErrorCode::kInvalidConfig, "n must be >= 3");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "p must lie in (0, 1]");
  if (!(q >= 0.0 && q < 1.0)) throw Error(ErrorCode::kInvalidConfig, "q must lie in [0, 1)");
  if (!(sigma_deg >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "sigma must be >= 0");
}

int SynthEdgeCount(int n, double p) {
  const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
  return static_cast<int>(std::floor(p * static_cast<double>(pairs)));
}

Rotation UniformRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(normal(rng), normal(rng), normal(rng), normal(rng));
  } while (q.norm() < 1e-6);
  return Rotation::FromQuaternion(q);
}

Rotation NoiseRotation(std::mt19937_64& rng, double sigma_rad, NoiseModel model) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (model == NoiseModel::kIsotropic) {
    const Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
    return Exp(sigma_rad * v);
  }
  Eigen::Vector3d axis;
  do {
    axis = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (axis.norm() < 1e-9);
  axis.normalize();
  return Exp(sigma_rad * normal(rng) * axis);
}

SynthDataset Generate(const SynthConfig& cfg) {
  cfg.Validate();
  const int n = cfg.n;
  const int target = SynthEdgeCount(n, cfg.p);
  if (target < n) {
    throw Error(ErrorCode::kInvalidConfig,
                "p too small: the ring alone needs n edges");
  }
  std::mt19937_64 rng(cfg.seed);

  std::vector<Rotation> truth(n);
  for (Rotation& r : truth) r = UniformRotation(rng);

  // Bands of increasing offset. For even n the last offset n/2 only has n/2
  // distinct pairs.
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(target);
  for (int offset = 1; offset <= n / 2 && static_cast<int>(pairs.size()) < target;
       ++offset) {
    const int band = (2 * offset == n) ? n / 2 : n;
    for (int i = 0; i < band && static_cast<int>(pairs.size()) < target; ++i) {
      const int j = (i + offset) % n;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }

  const int num_outliers =
      static_cast<int>(std::floor(cfg.q * static_cast<double>(target)));
  const int non_ring = target - n;
  if (num_outliers > non_ring) {
    throw Error(ErrorCode::kInvalidConfig,
                "q too large: not enough non-ring edges to corrupt");
  }
  // Ring edges are the first n pairs.
  std::vector<int> pool(non_ring);
  for (int k = 0; k < non_ring; ++k) pool[k] = n + k;
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<bool> is_outlier(target, false);
  for (int k = 0; k < num_outliers; ++k) is_outlier[pool[k]] = true;

  const double sigma = cfg.sigma_deg * std::numbers::pi / 180.0;
  std::vector<RelEdge> edges(target);
  for (int k = 0; k < target; ++k) {
    const auto [i, j] = pairs[k];
    Rotation rel = is_outlier[k] ? UniformRotation(rng)
                                 : truth[i] * truth[j].inverse();
    if (sigma > 0.0) rel = rel * NoiseRotation(rng, sigma, cfg.noise);
    edges[k] = {i, j, rel, std::nullopt};
  }

  // Randomized presentation order; Build canonicalizes storage, labels
  // follow the stored order.
  std::vector<int> order(target);
  for (int k = 0; k < target; ++k) order[k] = k;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<RelEdge> shuffled;
  shuffled.reserve(target);
  for (int k : order) shuffled.push_back(edges[k]);

  std::vector<std::optional<Rotation>> gt(truth.begin(), truth.end());
  SynthDataset d;
  d.graph = ViewGraph::Build(n, std::move(shuffled), std::move(gt));
  d.outlier.assign(target, false);
  for (int k = 0; k < target; ++k) {
    if (!is_outlier[k]) continue;
    const auto e = d.graph.FindEdge(pairs[k].first, pairs[k].second);
    d.outlier[*e] = true;
  }
  return d;
}

void WriteLabels(const SynthDataset& d, std::ostream& out) {
  for (EdgeId e = 0; e < d.graph.num_edges(); ++e) {
    const RelEdge& ed = d.graph.edge(e);
    out << "L " << ed.i << ' ' << ed.j << ' ' << (d.outlier[e] ? 1 : 0) << '\n';
  }
}

}  // namespace hara
