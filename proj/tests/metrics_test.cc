#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hara/error.h"
#include "hara/metrics.h"
#include "test_util.h"

using namespace hara;
using namespace hara::testing;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::vector<std::optional<Rotation>> Opt(const std::vector<Rotation>& rs) {
  return {rs.begin(), rs.end()};
}

}  // namespace

TEST_CASE("identical estimates") {
  std::mt19937_64 rng(1);
  const auto gt = RandomRotations(rng, 20);
  const MetricsResult m = Evaluate(gt, Opt(gt));
  CHECK(m.theta1_deg < 1e-9);
  CHECK(m.theta2_deg < 1e-9);
  CHECK(m.n_evaluated == 20);
}

TEST_CASE("global offset is absorbed") {
  std::mt19937_64 rng(2);
  const auto gt = RandomRotations(rng, 20);
  const Rotation q = RandomRotation(rng);
  std::vector<Rotation> est;
  for (const Rotation& r : gt) est.push_back(r * q);
  const MetricsResult m = Evaluate(est, Opt(gt));
  CHECK(m.theta1_deg < 1e-7);
  CHECK(m.theta2_deg < 1e-7);
}

TEST_CASE("computed alignment beats random alignments") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const auto gt = RandomRotations(rng, 20);
    std::vector<Rotation> est;
    const Rotation q = RandomRotation(rng);
    for (const Rotation& r : gt) est.push_back(r * q * Exp(RandomVector(rng, 0.0, 0.3)));
    const MetricsResult m = Evaluate(est, Opt(gt));
    CHECK(std::abs(RmsErrorAt(est, gt, m.r_align_l2) / kDeg - m.theta2_deg) < 1e-9);
    CHECK(std::abs(MeanErrorAt(est, gt, m.r_align_l1) / kDeg - m.theta1_deg) < 1e-9);
    int beaten = 0;
    for (int t = 0; t < 1000; ++t) {
      const Rotation trial = RandomRotation(rng);
      beaten += RmsErrorAt(est, gt, trial) / kDeg > m.theta2_deg ? 1 : 0;
    }
    CHECK(beaten == 1000);
  }
}

TEST_CASE("each alignment optimizes its own statistic") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto gt = RandomRotations(rng, 15);
    std::vector<Rotation> est;
    for (const Rotation& r : gt) est.push_back(r * Exp(RandomVector(rng, 0.0, 1.0)));
    const MetricsResult m = Evaluate(est, Opt(gt));
    CHECK(MeanErrorAt(est, gt, m.r_align_l1) <= MeanErrorAt(est, gt, m.r_align_l2) + 1e-9);
    CHECK(RmsErrorAt(est, gt, m.r_align_l2) <= RmsErrorAt(est, gt, m.r_align_l1) + 1e-9);
  }
}

TEST_CASE("gauge invariance") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto gt = RandomRotations(rng, 25);
    std::vector<Rotation> est;
    for (const Rotation& r : gt) est.push_back(r * Exp(RandomVector(rng, 0.0, 0.2)));
    const Rotation q = RandomRotation(rng);
    std::vector<Rotation> moved;
    for (const Rotation& r : est) moved.push_back(r * q);
    const MetricsResult a = Evaluate(est, Opt(gt));
    const MetricsResult b = Evaluate(moved, Opt(gt));
    CHECK(std::abs(a.theta1_deg - b.theta1_deg) < 1e-9);
    CHECK(std::abs(a.theta2_deg - b.theta2_deg) < 1e-9);
  }
}

TEST_CASE("one degree perturbation reads as one degree") {
  std::mt19937_64 rng(5);
  const auto gt = RandomRotations(rng, 10000);
  std::vector<Rotation> est;
  for (const Rotation& r : gt) est.push_back(r * Exp(RandomUnit(rng) * kDeg));
  const MetricsResult m = Evaluate(est, Opt(gt));
  CHECK(std::abs(m.theta2_deg - 1.0) < 0.05);
}

TEST_CASE("nodes without ground truth are skipped") {
  std::mt19937_64 rng(6);
  const auto gt = RandomRotations(rng, 6);
  std::vector<std::optional<Rotation>> partial = Opt(gt);
  partial[1].reset();
  partial[4].reset();
  std::vector<std::optional<Rotation>> est = Opt(gt);
  est[1] = RandomRotation(rng);
  est[2].reset();
  const MetricsResult m = Evaluate(est, partial);
  CHECK(m.n_evaluated == 3);
  CHECK(m.theta2_deg < 1e-9);
  std::vector<std::optional<Rotation>> none(6);
  try {
    Evaluate(est, none);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoOverlap);
  }
}
