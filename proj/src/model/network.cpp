#include "mvd/model/network.hpp"

#include <stdexcept>

#include "mvd/numerics/kernels.hpp"
#include "mvd/numerics/ops.hpp"

namespace mvd {
namespace {

Matrix affine(const Matrix& x, const Dense& d) {
  Matrix y = matmul_nt(x, d.weight);
  for (std::size_t r = 0; r < y.rows(); ++r) kernels::axpy(1.0, d.bias.data(), y.row(r).data(), y.cols());
  return y;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.flat()) v = v > 0.0 ? v : 0.0;
  return y;
}

/// dW += dY^T X, db += colsum(dY); returns dX = dY W when requested.
void affine_backward(const Matrix& dy, const Matrix& x, const Dense& layer, Dense& grad, Matrix* dx) {
  matmul_tn_accumulate(dy, x, grad.weight);
  for (std::size_t r = 0; r < dy.rows(); ++r) kernels::axpy(1.0, dy.row(r).data(), grad.bias.data(), dy.cols());
  if (dx != nullptr) *dx = matmul(dy, layer.weight);
}

void relu_backward(Matrix& d, const Matrix& pre) {
  auto g = d.flat();
  auto p = pre.flat();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(p[i] > 0.0)) g[i] = 0.0;
}

/// dv = (dz - z (z . dz)) / ||v||; zero for degenerate rows.
Matrix normalize_backward(const Matrix& dz, const Matrix& z, const std::vector<double>& norms,
                          const std::vector<std::size_t>& degenerate) {
  Matrix dv(dz.rows(), dz.cols());
  std::size_t next_degenerate = 0;
  for (std::size_t r = 0; r < dz.rows(); ++r) {
    if (next_degenerate < degenerate.size() && degenerate[next_degenerate] == r) {
      ++next_degenerate;
      continue;
    }
    const double proj = kernels::dot(z.row(r).data(), dz.row(r).data(), dz.cols());
    const double inv = 1.0 / norms[r];
    auto out = dv.row(r);
    auto zr = z.row(r);
    auto dr = dz.row(r);
    for (std::size_t c = 0; c < dz.cols(); ++c) out[c] = (dr[c] - zr[c] * proj) * inv;
  }
  return dv;
}

void check_batch(const ModelConfig& config, std::span<const Matrix> batch) {
  if (batch.size() != config.view_count()) throw std::invalid_argument("forward: view count mismatch");
  for (std::size_t m = 0; m < batch.size(); ++m) {
    if (batch[m].cols() != config.input_dim(m)) throw std::invalid_argument("forward: input dim mismatch");
    if (batch[m].rows() != batch.front().rows()) throw std::invalid_argument("forward: batch size mismatch");
  }
}

}  // namespace

ForwardCache forward_cached(const ModelConfig& config, const ModelParams& params, std::span<const Matrix> batch) {
  check_batch(config, batch);
  const std::size_t views = config.view_count();
  ForwardCache c;
  c.x.assign(batch.begin(), batch.end());
  std::vector<const Matrix*> parts;
  for (const auto& x : c.x) parts.push_back(&x);
  c.x_concat = hconcat(parts);
  c.out.shared = affine(c.x_concat, params.shared);
  c.views.resize(views);
  for (std::size_t m = 0; m < views; ++m) {
    const ViewParams& p = params.views[m];
    auto& v = c.views[m];

    v.specific_pre = affine(c.x[m], p.specific1);
    v.specific_hidden = relu(v.specific_pre);
    auto zp = row_normalize(affine(v.specific_hidden, p.specific2));
    v.specific_norm = std::move(zp.norms);

    v.aligned_pre = affine(c.out.shared, p.aligned1);
    v.aligned_hidden = relu(v.aligned_pre);
    auto za = row_normalize(affine(v.aligned_hidden, p.aligned2));
    v.aligned_norm = std::move(za.norms);

    const Matrix* rin[] = {&zp.values, &za.values};
    v.recon_input = hconcat(rin);
    v.recon_pre = affine(v.recon_input, p.recon1);
    v.recon_hidden = relu(v.recon_pre);
    c.out.x_bar.push_back(affine(v.recon_hidden, p.recon2));

    c.out.z_specific.push_back(std::move(zp.values));
    c.out.z_aligned.push_back(std::move(za.values));
    c.out.degenerate_specific.push_back(std::move(zp.degenerate_rows));
    c.out.degenerate_aligned.push_back(std::move(za.degenerate_rows));
  }
  return c;
}

ForwardOutputs forward(const ModelConfig& config, const ModelParams& params, std::span<const Matrix> batch) {
  return forward_cached(config, params, batch).out;
}

LossBreakdown compute_losses(const ForwardCache& c, const LossWeights& w) {
  return total_loss(loss_alignment(c.out.z_aligned), loss_specific(c.out.z_specific),
                    loss_info(c.x, c.out.z_specific), loss_recon(c.out.x_bar, c.x), w);
}

GradientResult backward(const ModelConfig& config, const ModelParams& params, const ForwardCache& c,
                        const LossWeights& w) {
  const std::size_t views = config.view_count();
  const std::size_t b = c.x.front().rows();
  GradientResult result{ModelParams::zeros(config), compute_losses(c, w)};
  ModelParams& g = result.grads;

  std::vector<Matrix> d_zp, d_za, d_xbar;
  for (std::size_t m = 0; m < views; ++m) {
    d_zp.emplace_back(b, config.input_dim(m));
    d_za.emplace_back(b, config.aligned_dim);
    d_xbar.emplace_back(b, config.input_dim(m));
  }
  if (w.lambda1 != 0.0) loss_alignment_grad(c.out.z_aligned, w.lambda1, d_za);
  if (w.lambda2 != 0.0) loss_specific_grad(c.out.z_specific, w.lambda2, d_zp);
  if (w.lambda3 != 0.0) loss_info_grad(c.x, w.lambda3, d_zp);
  if (w.lambda4 != 0.0) loss_recon_grad(c.out.x_bar, c.x, w.lambda4, d_xbar);

  Matrix d_shared(b, config.shared_dim);
  for (std::size_t m = 0; m < views; ++m) {
    const ViewParams& p = params.views[m];
    ViewParams& gp = g.views[m];
    const auto& v = c.views[m];
    const std::size_t d = config.input_dim(m);

    // Reconstruction pathway; its input gradient splits back onto z_p and z_a.
    Matrix d_hidden, d_rin;
    affine_backward(d_xbar[m], v.recon_hidden, p.recon2, gp.recon2, &d_hidden);
    relu_backward(d_hidden, v.recon_pre);
    affine_backward(d_hidden, v.recon_input, p.recon1, gp.recon1, &d_rin);
    for (std::size_t r = 0; r < b; ++r) {
      auto src = d_rin.row(r);
      kernels::axpy(1.0, src.data(), d_zp[m].row(r).data(), d);
      kernels::axpy(1.0, src.data() + d, d_za[m].row(r).data(), config.aligned_dim);
    }

    // Specific pathway.
    Matrix d_vp = normalize_backward(d_zp[m], c.out.z_specific[m], v.specific_norm, c.out.degenerate_specific[m]);
    affine_backward(d_vp, v.specific_hidden, p.specific2, gp.specific2, &d_hidden);
    relu_backward(d_hidden, v.specific_pre);
    affine_backward(d_hidden, c.x[m], p.specific1, gp.specific1, nullptr);

    // Aligned pathway; accumulates into the shared representation.
    Matrix d_va = normalize_backward(d_za[m], c.out.z_aligned[m], v.aligned_norm, c.out.degenerate_aligned[m]);
    affine_backward(d_va, v.aligned_hidden, p.aligned2, gp.aligned2, &d_hidden);
    relu_backward(d_hidden, v.aligned_pre);
    Matrix d_u;
    affine_backward(d_hidden, c.out.shared, p.aligned1, gp.aligned1, &d_u);
    kernels::axpy(1.0, d_u.data(), d_shared.data(), d_u.size());
  }
  affine_backward(d_shared, c.x_concat, params.shared, g.shared, nullptr);
  return result;
}

GradientResult loss_and_gradient(const ModelConfig& config, const ModelParams& params,
                                 std::span<const Matrix> batch, const LossWeights& w) {
  return backward(config, params, forward_cached(config, params, batch), w);
}

Embeddings embed(const ModelConfig& config, const ModelParams& params, std::span<const Matrix> features) {
  auto out = forward(config, params, features);
  return {std::move(out.z_specific), std::move(out.z_aligned)};
}

}  // namespace mvd
