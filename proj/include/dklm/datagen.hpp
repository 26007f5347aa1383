#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dklm/metrics.hpp"

namespace dklm {

/// A generated dataset: D x N points (columns), ground-truth labels, tag,
/// and for the corrupted generator the affected column indices.
struct LabeledDataset {
  Matrix x;
  LabelVector truth;
  std::string name;
  std::vector<Index> corrupted_columns;
};

/// Two interleaved half-circles: upper arc (cos t, sin t) and lower arc
/// (1 - cos t, 1/2 - sin t), t uniform on [0, pi], plus isotropic Gaussian
/// noise. Labels 0 (upper) and 1 (lower).
inline LabeledDataset gen_two_moons(Index n_per_moon, double noise_sd,
                                    std::uint64_t seed) {
  if (n_per_moon < 1) throw ParameterError("gen_two_moons: n_per_moon must be >= 1");
  if (noise_sd < 0.0) throw ParameterError("gen_two_moons: noise_sd must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
  const Index n = 2 * n_per_moon;
  LabeledDataset ds;
  ds.name = "two_moons";
  ds.x.resize(2, n);
  ds.truth.labels.resize(n);
  ds.truth.k = 2;
  for (Index i = 0; i < n; ++i) {
    double t = angle(rng);
    double px, py;
    if (i < n_per_moon) {
      px = std::cos(t);
      py = std::sin(t);
      ds.truth.labels[i] = 0;
    } else {
      px = 1.0 - std::cos(t);
      py = 0.5 - std::sin(t);
      ds.truth.labels[i] = 1;
    }
    if (noise_sd > 0.0) {
      px += noise(rng);
      py += noise(rng);
    }
    ds.x(0, i) = px;
    ds.x(1, i) = py;
  }
  return ds;
}

/// Concentric circles with uniform angles and Gaussian radial noise.
inline LabeledDataset gen_three_rings(Index n_per_ring,
                                      std::array<double, 3> radii,
                                      double noise_sd, std::uint64_t seed) {
  if (n_per_ring < 1) throw ParameterError("gen_three_rings: n_per_ring must be >= 1");
  if (!(radii[0] > 0.0 && radii[1] > radii[0] && radii[2] > radii[1])) {
    throw ParameterError("gen_three_rings: radii must be positive and strictly increasing");
  }
  if (noise_sd < 0.0) throw ParameterError("gen_three_rings: noise_sd must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
  const Index n = 3 * n_per_ring;
  LabeledDataset ds;
  ds.name = "three_rings";
  ds.x.resize(2, n);
  ds.truth.labels.resize(n);
  ds.truth.k = 3;
  for (Index i = 0; i < n; ++i) {
    int ring = static_cast<int>(i / n_per_ring);
    double t = angle(rng);
    double r = radii[static_cast<size_t>(ring)];
    if (noise_sd > 0.0) r += noise(rng);
    ds.x(0, i) = r * std::cos(t);
    ds.x(1, i) = r * std::sin(t);
    ds.truth.labels[i] = ring;
  }
  return ds;
}

/// Cluster waveforms of the 78-dimensional four-function dataset,
/// evaluated at dimension d (1-based).
inline double syd4_prototype(int cluster, double d) {
  const double pi = std::numbers::pi;
  switch (cluster) {
    case 0:
      return std::cos(4.0 * pi * d / 7.0) + std::cos(pi * (d - 40.0));
    case 1:
      return std::sin(pi * d / 4.0 - 4.0) - std::sin(pi * d / 5.0);
    case 2:
      return 1.0 - std::sin(pi * d / 3.0) * std::cos(pi * (d - 4.0) / 5.0) *
                       std::cos(pi * d);
    case 3:
      return std::sin(pi * d / 3.0) * std::cos(pi * d / 6.0) *
             std::cos(pi * (d - 12.0));
    default:
      throw ParameterError("syd4_prototype: cluster must be in [0, 3]");
  }
}

/// 78 x 1300 four-cluster dataset (325 samples per waveform). Every sample
/// carries small Gaussian jitter so columns are distinct; a uniformly drawn
/// 20% of the columns receive additive uniform [-1, 1] corruption.
inline LabeledDataset gen_syd4(std::uint64_t seed, double jitter_sd = 0.01,
                               double corruption_amplitude = 1.0) {
  constexpr Index dims = 78;
  constexpr Index per_cluster = 325;
  constexpr Index n = 4 * per_cluster;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, jitter_sd > 0.0 ? jitter_sd : 1.0);
  LabeledDataset ds;
  ds.name = "syd4";
  ds.x.resize(dims, n);
  ds.truth.labels.resize(n);
  ds.truth.k = 4;
  for (Index i = 0; i < n; ++i) {
    int cluster = static_cast<int>(i / per_cluster);
    ds.truth.labels[i] = cluster;
    for (Index d = 0; d < dims; ++d) {
      double v = syd4_prototype(cluster, double(d + 1));
      if (jitter_sd > 0.0) v += jitter(rng);
      ds.x(d, i) = v;
    }
  }
  const Index corrupt = (n * 2) / 10;  // floor(0.2 N)
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(corrupt);
  std::sort(order.begin(), order.end());
  std::uniform_real_distribution<double> corruption(-corruption_amplitude,
                                                    corruption_amplitude);
  for (Index col : order) {
    for (Index d = 0; d < dims; ++d) ds.x(d, col) += corruption(rng);
  }
  ds.corrupted_columns = std::move(order);
  return ds;
}

}  // namespace dklm
