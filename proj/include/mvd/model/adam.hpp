#pragma once

#include <cstdint>

#include "mvd/model/params.hpp"

namespace mvd {

struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const ModelConfig& config) {
    return {ModelParams::zeros(config), ModelParams::zeros(config), 0};
  }
  bool operator==(const AdamState&) const = default;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update in place; increments state.step.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr, const AdamHyper& h = {});

}  // namespace mvd
