#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mvd/dataio/dataset.hpp"

namespace mvd {

struct SyntheticAttribute {
  std::string name;
  std::vector<std::string> classes;
  std::size_t view = 0;  // the single view this attribute drives
};

/// Three views, each driven by one attribute, plus a latent shared by all views.
///
/// Raw feature of item i for view m:
///   w_class * centroid[m][class_m(i)] + w_shared * P_m g_i + w_noise * eps
/// with unit-norm centroids, g_i ~ N(0, I_shared_dim), P_m with N(0, 1/d_m)
/// entries (columns of unit expected norm) and eps ~ N(0, I_d_m). Rows are
/// then unit-normalized.
struct SyntheticConfig {
  std::vector<ViewSpec> views;
  std::vector<SyntheticAttribute> attributes;
  std::size_t items = 5000;
  std::size_t shared_latent_dim = 16;
  double w_class = 1.0;
  double w_shared = 0.5;
  double w_noise = 0.3;
  std::array<double, 3> split_ratio{6.0, 3.0, 1.0};
  std::uint64_t seed = 0;

  /// object/style/color with dims 256/128/64 and 9/7/4 classes.
  static SyntheticConfig defaults();
  void validate() const;
};

MultiViewDataset generate_synthetic(const SyntheticConfig& config);

/// Draws a collection from `pool` (dataset row indices): round(purity * size)
/// members of `target_class`, the rest split evenly over the other classes. Purity 0 is an even
/// mixture over all classes of the attribute, the target included.
std::vector<std::size_t> simulate_collection(const MultiViewDataset& dataset, std::span<const std::size_t> pool,
                                             const std::string& attribute, const std::string& target_class,
                                             std::size_t size, double purity, std::uint64_t seed);

}  // namespace mvd
