#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hara/error.h"
#include "hara/synthetic.h"

using namespace hara;

namespace {

int RingOffset(const RelEdge& e, int n) {
  const int d = e.j - e.i;
  return std::min(d, n - d);
}

bool IsRing(const RelEdge& e, int n) { return RingOffset(e, n) == 1; }

SynthConfig Config(int n, double p, double q, double sigma, std::uint64_t seed) {
  SynthConfig c;
  c.n = n;
  c.p = p;
  c.q = q;
  c.sigma_deg = sigma;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("edge count") {
  CHECK(SynthEdgeCount(100, 0.5) == 2475);
  const SynthDataset d = Generate(Config(100, 0.5, 0.0, 5, 1));
  CHECK(d.graph.num_edges() == 2475);
  CHECK(d.outlier.size() == 2475u);
}

TEST_CASE("exact data without noise or outliers") {
  const SynthDataset d = Generate(Config(30, 0.4, 0.0, 0.0, 2));
  for (const RelEdge& e : d.graph.edges()) {
    const Rotation expected = *d.graph.ground_truth()[e.i] * d.graph.ground_truth()[e.j]->inverse();
    CHECK(e.rel == expected);
  }
}

TEST_CASE("outliers avoid the ring") {
  const SynthDataset d = Generate(Config(100, 0.5, 0.3, 5, 3));
  int outliers = 0;
  std::vector<int> inlier_degree(100, 0);
  for (EdgeId e = 0; e < d.graph.num_edges(); ++e) {
    const RelEdge& ed = d.graph.edge(e);
    if (d.outlier[e]) {
      ++outliers;
      CHECK(!IsRing(ed, 100));
    } else {
      ++inlier_degree[ed.i];
      ++inlier_degree[ed.j];
    }
  }
  CHECK(outliers == 742);
  for (int deg : inlier_degree) CHECK(deg >= 2);
}

TEST_CASE("same seed, same dataset") {
  const SynthDataset a = Generate(Config(50, 0.3, 0.2, 5, 9));
  const SynthDataset b = Generate(Config(50, 0.3, 0.2, 5, 9));
  REQUIRE(a.graph.num_edges() == b.graph.num_edges());
  for (EdgeId e = 0; e < a.graph.num_edges(); ++e) {
    CHECK(a.graph.edge(e).rel == b.graph.edge(e).rel);
    CHECK(a.outlier[e] == b.outlier[e]);
  }
  for (int i = 0; i < 50; ++i) CHECK(*a.graph.ground_truth()[i] == *b.graph.ground_truth()[i]);
  const SynthDataset c = Generate(Config(50, 0.3, 0.2, 5, 10));
  CHECK(!(c.graph.edge(0).rel == a.graph.edge(0).rel));
}

TEST_CASE("band structure") {
  const int n = 100;
  const int target = SynthEdgeCount(n, 0.2);
  int b = 0;
  while (b * n < target) ++b;
  const SynthDataset d = Generate(Config(n, 0.2, 0.0, 0.0, 4));
  int max_offset = 0;
  std::vector<int> per_offset(n, 0);
  for (const RelEdge& e : d.graph.edges()) {
    max_offset = std::max(max_offset, RingOffset(e, n));
    ++per_offset[RingOffset(e, n)];
  }
  CHECK(max_offset == b);
  for (int k = 1; k < b; ++k) CHECK(per_offset[k] == n);
  CHECK(per_offset[b] == target - (b - 1) * n);
}

TEST_CASE("complete graph") {
  const SynthDataset d = Generate(Config(10, 1.0, 0.0, 0.0, 5));
  CHECK(d.graph.num_edges() == 45);
  const SynthDataset odd = Generate(Config(9, 1.0, 0.0, 0.0, 5));
  CHECK(odd.graph.num_edges() == 36);
}

TEST_CASE("noise magnitude") {
  for (NoiseModel model : {NoiseModel::kAxisAngle, NoiseModel::kIsotropic}) {
    SynthConfig c = Config(200, 0.51, 0.0, 5, 6);
    c.noise = model;
    const SynthDataset d = Generate(c);
    double sum_sq = 0;
    int count = 0;
    for (const RelEdge& e : d.graph.edges()) {
      const Rotation clean = *d.graph.ground_truth()[e.i] * d.graph.ground_truth()[e.j]->inverse();
      const double a = AngularDistance(e.rel, clean) * 180.0 / std::numbers::pi;
      sum_sq += a * a;
      ++count;
    }
    CHECK(count >= 10000);
    const double rms = std::sqrt(sum_sq / count);
    // The isotropic model spreads sigma over three axes.
    const double expected = model == NoiseModel::kAxisAngle ? 5.0 : 5.0 * std::sqrt(3.0);
    CHECK(std::abs(rms - expected) < 0.1 * expected);
  }
}

TEST_CASE("invalid configurations") {
  CHECK_THROWS_AS(Generate(Config(2, 0.5, 0, 0, 1)), Error);
  CHECK_THROWS_AS(Generate(Config(10, 0.0, 0, 0, 1)), Error);
  CHECK_THROWS_AS(Generate(Config(10, 0.5, 1.0, 0, 1)), Error);
  CHECK_THROWS_AS(Generate(Config(10, 0.5, 0, -1, 1)), Error);
  CHECK_THROWS_AS(Generate(Config(100, 0.01, 0, 0, 1)), Error);
  CHECK_THROWS_AS(Generate(Config(10, 0.3, 0.9, 0, 1)), Error);
}

TEST_CASE("label sidecar") {
  const SynthDataset d = Generate(Config(10, 0.6, 0.2, 1, 7));
  std::ostringstream out;
  WriteLabels(d, out);
  std::istringstream in(out.str());
  std::string tag;
  int i = 0;
  int j = 0;
  int flag = 0;
  EdgeId e = 0;
  while (in >> tag >> i >> j >> flag) {
    CHECK(tag == "L");
    CHECK(d.graph.edge(e).i == i);
    CHECK(d.graph.edge(e).j == j);
    CHECK(d.outlier[e] == (flag == 1));
    ++e;
  }
  CHECK(e == d.graph.num_edges());
}
