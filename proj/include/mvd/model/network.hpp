#pragma once

#include <span>
#include <vector>

#include "mvd/model/losses.hpp"
#include "mvd/model/params.hpp"

namespace mvd {

struct ForwardOutputs {
  std::vector<Matrix> z_specific;  // B x d_m, unit rows
  std::vector<Matrix> z_aligned;   // B x d_a, unit rows
  std::vector<Matrix> x_bar;       // B x d_m, not normalized
  Matrix shared;                   // B x d_u
  /// Per view, batch rows whose pre-normalization activation was zero.
  std::vector<std::vector<std::size_t>> degenerate_specific;
  std::vector<std::vector<std::size_t>> degenerate_aligned;
};

/// Intermediate activations kept for the reverse pass.
struct ForwardCache {
  struct View {
    Matrix specific_pre, specific_hidden;  // pre-ReLU and post-ReLU
    std::vector<double> specific_norm;
    Matrix aligned_pre, aligned_hidden;
    std::vector<double> aligned_norm;
    Matrix recon_input;  // [z_p, z_a]
    Matrix recon_pre, recon_hidden;
  };
  std::vector<Matrix> x;
  Matrix x_concat;
  std::vector<View> views;
  ForwardOutputs out;
};

ForwardCache forward_cached(const ModelConfig& config, const ModelParams& params, std::span<const Matrix> batch);
ForwardOutputs forward(const ModelConfig& config, const ModelParams& params, std::span<const Matrix> batch);

LossBreakdown compute_losses(const ForwardCache& cache, const LossWeights& w);

struct GradientResult {
  ModelParams grads;
  LossBreakdown loss;
};

/// Exact gradient of the weighted total loss with respect to every parameter.
GradientResult backward(const ModelConfig& config, const ModelParams& params, const ForwardCache& cache,
                        const LossWeights& w);
GradientResult loss_and_gradient(const ModelConfig& config, const ModelParams& params,
                                 std::span<const Matrix> batch, const LossWeights& w);

struct Embeddings {
  std::vector<Matrix> z_specific;
  std::vector<Matrix> z_aligned;
};

/// Inference-mode forward returning only the normalized outputs.
Embeddings embed(const ModelConfig& config, const ModelParams& params, std::span<const Matrix> features);

}  // namespace mvd
