#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvd/dataio/dataset.hpp"

namespace mvd {

struct LossWeights {
  double lambda1 = 0.001;   // alignment
  double lambda2 = 0.05;    // orthogonalization
  double lambda3 = 0.001;   // information transfer
  double lambda4 = 0.0001;  // reconstruction

  bool operator==(const LossWeights&) const = default;
};

struct ModelConfig {
  std::vector<ViewSpec> views;
  std::vector<std::size_t> specific_hidden;  // per view
  std::vector<std::size_t> recon_hidden;     // per view
  std::size_t aligned_dim = 32;
  std::size_t shared_dim = 32;
  std::size_t aligned_hidden = 32;
  LossWeights loss_weights;
  double learning_rate = 1e-4;
  std::size_t batch_size = 64;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;

  /// Hidden widths max(d_m, 32); d_a = d_u = 32.
  static ModelConfig defaults_for(std::vector<ViewSpec> views);

  std::size_t view_count() const noexcept { return views.size(); }
  std::size_t input_dim(std::size_t m) const { return views[m].input_dim; }
  std::size_t total_input_dim() const;

  /// Throws std::invalid_argument on inconsistent dims or weights.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace mvd
