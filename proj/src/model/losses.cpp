#include "mvd/model/losses.hpp"

#include <stdexcept>

#include "mvd/numerics/kernels.hpp"
#include "mvd/numerics/ops.hpp"

namespace mvd {
namespace {

double trace_of_product_nt(const Matrix& a, const Matrix& b) {
  // tr(A B^T) = sum_i a_i . b_i
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += kernels::dot(a.row(i).data(), b.row(i).data(), a.cols());
  return t;
}

std::size_t common_rows(std::span<const Matrix> ms) {
  if (ms.empty()) throw std::invalid_argument("loss: no views");
  const std::size_t b = ms.front().rows();
  for (const auto& m : ms)
    if (m.rows() != b) throw std::invalid_argument("loss: batch size mismatch across views");
  return b;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

double loss_alignment(std::span<const Matrix> za) {
  const std::size_t b = common_rows(za);
  for (const auto& z : za)
    if (z.cols() != za.front().cols()) throw std::invalid_argument("loss_alignment: aligned dim mismatch");
  if (b == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t m = 0; m < za.size(); ++m)
    for (std::size_t n = m + 1; n < za.size(); ++n) sum += static_cast<double>(b) - trace_of_product_nt(za[m], za[n]);
  return sum / static_cast<double>(b);
}

double loss_specific(std::span<const Matrix> zp) {
  common_rows(zp);
  double sum = 0.0;
  for (std::size_t m = 0; m < zp.size(); ++m) {
    for (std::size_t n = m + 1; n < zp.size(); ++n) {
      const Matrix g = matmul_tn(zp[m], zp[n]);
      sum += kernels::dot(g.data(), g.data(), g.size()) / static_cast<double>(zp[m].cols() * zp[n].cols());
    }
  }
  return sum;
}

double loss_info(std::span<const Matrix> x, std::span<const Matrix> zp) {
  if (x.size() != zp.size()) throw std::invalid_argument("loss_info: view count mismatch");
  const std::size_t b = common_rows(x);
  if (b == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    require_same_shape(x[m], zp[m], "loss_info");
    sum += static_cast<double>(b) - trace_of_product_nt(x[m], zp[m]);
  }
  return sum / static_cast<double>(b);
}

double loss_recon(std::span<const Matrix> x_bar, std::span<const Matrix> x) {
  if (x.size() != x_bar.size()) throw std::invalid_argument("loss_recon: view count mismatch");
  const std::size_t b = common_rows(x);
  if (b == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    require_same_shape(x_bar[m], x[m], "loss_recon");
    sum += kernels::squared_distance(x_bar[m].data(), x[m].data(), x[m].size()) /
           static_cast<double>(b * x[m].cols());
  }
  return sum;
}

LossBreakdown total_loss(double ali, double spc, double inf, double rec, const LossWeights& w) {
  LossBreakdown out{ali, spc, inf, rec, 0.0};
  out.total = w.lambda1 * ali + w.lambda2 * spc + w.lambda3 * inf + w.lambda4 * rec;
  return out;
}

void loss_alignment_grad(std::span<const Matrix> za, double scale, std::span<Matrix> dza) {
  const std::size_t b = common_rows(za);
  if (b == 0) return;
  const double c = -scale / static_cast<double>(b);
  for (std::size_t m = 0; m < za.size(); ++m) {
    for (std::size_t n = 0; n < za.size(); ++n) {
      if (n == m) continue;
      kernels::axpy(c, za[n].data(), dza[m].data(), za[n].size());
    }
  }
}

void loss_specific_grad(std::span<const Matrix> zp, double scale, std::span<Matrix> dzp) {
  common_rows(zp);
  for (std::size_t m = 0; m < zp.size(); ++m) {
    for (std::size_t n = m + 1; n < zp.size(); ++n) {
      const double c = 2.0 * scale / static_cast<double>(zp[m].cols() * zp[n].cols());
      const Matrix g = matmul_tn(zp[m], zp[n]);  // d_m x d_n
      const Matrix dm = matmul_nt(zp[n], g);     // B x d_m  = Zp_n G^T
      const Matrix dn = matmul(zp[m], g);        // B x d_n  = Zp_m G
      kernels::axpy(c, dm.data(), dzp[m].data(), dm.size());
      kernels::axpy(c, dn.data(), dzp[n].data(), dn.size());
    }
  }
}

void loss_info_grad(std::span<const Matrix> x, double scale, std::span<Matrix> dzp) {
  const std::size_t b = common_rows(x);
  if (b == 0) return;
  const double c = -scale / static_cast<double>(b);
  for (std::size_t m = 0; m < x.size(); ++m) kernels::axpy(c, x[m].data(), dzp[m].data(), x[m].size());
}

void loss_recon_grad(std::span<const Matrix> x_bar, std::span<const Matrix> x, double scale,
                     std::span<Matrix> dxbar) {
  const std::size_t b = common_rows(x);
  if (b == 0) return;
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double c = 2.0 * scale / static_cast<double>(b * x[m].cols());
    kernels::axpy(c, x_bar[m].data(), dxbar[m].data(), x[m].size());
    kernels::axpy(-c, x[m].data(), dxbar[m].data(), x[m].size());
  }
}

}  // namespace mvd
