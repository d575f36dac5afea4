#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvd/model/config.hpp"
#include "mvd/numerics/matrix.hpp"

namespace mvd {

/// Affine map y = W x + b with W stored (out x in).
struct Dense {
  Matrix weight;
  Vector bias;

  std::size_t in_dim() const noexcept { return weight.cols(); }
  std::size_t out_dim() const noexcept { return weight.rows(); }
  bool operator==(const Dense&) const = default;
};

struct ViewParams {
  Dense specific1, specific2;  // x_m -> hidden -> d_m
  Dense aligned1, aligned2;    // u -> hidden -> d_a
  Dense recon1, recon2;        // [z_p; z_a] -> hidden -> d_m

  bool operator==(const ViewParams&) const = default;
};

struct ModelParams {
  Dense shared;  // [x_1 .. x_M] -> d_u
  std::vector<ViewParams> views;

  /// Zero-filled parameters with the shapes implied by `config`.
  static ModelParams zeros(const ModelConfig& config);

  /// Every tensor in a fixed order; names parallel `tensors()`.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::vector<std::string> tensor_names(const ModelConfig& config) const;
  std::size_t parameter_count() const;
  bool finite() const;

  bool operator==(const ModelParams&) const = default;
};

/// Glorot-uniform weights, zero biases, from a seeded generator.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

}  // namespace mvd
