#pragma once

// The four loss terms over a batch of B items. View pairs are unordered (m < m').
// Each *_grad function accumulates `scale * dL/dZ` into the output matrices,
// which must already have the shapes of the corresponding inputs.

#include <span>

#include "mvd/model/config.hpp"
#include "mvd/numerics/matrix.hpp"

namespace mvd {

struct LossBreakdown {
  double ali = 0.0;
  double spc = 0.0;
  double inf = 0.0;
  double rec = 0.0;
  double total = 0.0;

  bool operator==(const LossBreakdown&) const = default;
};

/// (1/B) sum_{m<m'} (B - tr(Za_m Za_m'^T))
double loss_alignment(std::span<const Matrix> z_aligned);
/// sum_{m<m'} ||Zp_m^T Zp_m'||_F^2 / (d_m d_m')
double loss_specific(std::span<const Matrix> z_specific);
/// (1/B) sum_m (B - tr(X_m Zp_m^T))
double loss_info(std::span<const Matrix> x, std::span<const Matrix> z_specific);
/// sum_m ||Xbar_m - X_m||_F^2 / (B d_m)
double loss_recon(std::span<const Matrix> x_bar, std::span<const Matrix> x);

/// Fills `total` from the four components.
LossBreakdown total_loss(double ali, double spc, double inf, double rec, const LossWeights& w);

void loss_alignment_grad(std::span<const Matrix> z_aligned, double scale, std::span<Matrix> d_z_aligned);
void loss_specific_grad(std::span<const Matrix> z_specific, double scale, std::span<Matrix> d_z_specific);
void loss_info_grad(std::span<const Matrix> x, double scale, std::span<Matrix> d_z_specific);
void loss_recon_grad(std::span<const Matrix> x_bar, std::span<const Matrix> x, double scale,
                     std::span<Matrix> d_x_bar);

}  // namespace mvd
