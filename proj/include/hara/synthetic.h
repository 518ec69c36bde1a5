#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "hara/view_graph.h"

namespace hara {

enum class NoiseModel {
  // Exp(theta * axis), theta ~ N(0, sigma^2), axis uniform on the sphere.
  kAxisAngle,
  // Exp(v), v ~ N(0, sigma^2 I_3).
  kIsotropic,
};

struct SynthConfig {
  int n = 100;
  double p = 0.5;          // fraction of all node pairs that become edges
  double q = 0.0;          // fraction of edges turned into outliers
  double sigma_deg = 5.0;
  std::uint64_t seed = 0;
  NoiseModel noise = NoiseModel::kAxisAngle;

  void Validate() const;
};

struct SynthDataset {
  ViewGraph graph;             // ground truth populated for every node
  std::vector<bool> outlier;   // aligned with graph.edges()
};

// Nodes on a circle; edges by increasing index offset (ring first, then
// offset 2, 3, ...) until floor(p n (n-1) / 2) pairs; floor(q E) non-ring
// edges replaced by uniform random rotations; all edges perturbed by noise.
SynthDataset Generate(const SynthConfig& cfg);

// Number of edges the generator produces.
int SynthEdgeCount(int n, double p);

Rotation UniformRotation(std::mt19937_64& rng);
Rotation NoiseRotation(std::mt19937_64& rng, double sigma_rad, NoiseModel model);

// "L <i> <j> <0|1>" per edge.
void WriteLabels(const SynthDataset& d, std::ostream& out);

}  // namespace hara
