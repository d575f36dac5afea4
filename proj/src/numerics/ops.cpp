#include "mvd/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mvd/numerics/kernels.hpp"

namespace mvd {

SimilarityKind parse_similarity_kind(std::string_view s) {
  if (s == "dot") return SimilarityKind::Dot;
  if (s == "inverse_l2") return SimilarityKind::InverseL2;
  throw std::invalid_argument("unknown similarity kind: " + std::string(s));
}

std::string_view to_string(SimilarityKind k) {
  return k == SimilarityKind::Dot ? "dot" : "inverse_l2";
}

double similarity(std::span<const double> a, std::span<const double> b, SimilarityKind kind) {
  if (a.size() != b.size()) throw std::invalid_argument("similarity: dimension mismatch");
  if (kind == SimilarityKind::Dot) return kernels::dot(a.data(), b.data(), a.size());
  return 1.0 / (kInverseL2Epsilon + std::sqrt(kernels::squared_distance(a.data(), b.data(), a.size())));
}

NormalizedRows row_normalize(const Matrix& m, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("row_normalize: epsilon must be positive");
  NormalizedRows out{Matrix(m.rows(), m.cols()), std::vector<double>(m.rows()), {}};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto src = m.row(r);
    const double norm = std::sqrt(kernels::dot(src.data(), src.data(), src.size()));
    out.norms[r] = norm;
    if (norm <= epsilon) {
      out.degenerate_rows.push_back(r);
      continue;
    }
    auto dst = out.values.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c] / norm;
  }
  return out;
}

Matrix matsim(const Matrix& p, const Matrix& q, SimilarityKind kind) {
  if (p.cols() != q.cols()) throw std::invalid_argument("matsim: column count mismatch");
  if (kind == SimilarityKind::Dot) return matmul_nt(p, q);
  Matrix s(p.rows(), q.rows());
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < q.rows(); ++j)
      s(i, j) = 1.0 / (kInverseL2Epsilon + std::sqrt(k.squared_distance(p.row(i).data(), q.row(j).data(), p.cols())));
  return s;
}

Vector softmax(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("softmax: empty input");
  const double mx = *std::max_element(v.begin(), v.end());
  Vector out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return {0.0, true};
  const double r = sxy / std::sqrt(sxx * syy);
  return {std::clamp(r, -1.0, 1.0), false};
}

Vector average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  Vector ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j + 1);  // mean of ranks i+1 .. j
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = shared;
    i = j;
  }
  return ranks;
}

PearsonResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  const Vector rx = average_ranks(x);
  const Vector ry = average_ranks(y);
  return pearson(rx, ry);
}

Matrix center_gram(const Matrix& k) {
  if (k.rows() != k.cols()) throw std::invalid_argument("center_gram: matrix must be square");
  const std::size_t n = k.rows();
  if (n == 0) return {};
  // (HKH)_ij = K_ij - rowmean_i - colmean_j + grandmean
  Vector row_mean(n, 0.0), col_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row_mean[i] += k(i, j);
      col_mean[j] += k(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
    col_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = k(i, j) - row_mean[i] - col_mean[j] + grand;
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  kernels::active().gemm(a.rows(), b.cols(), a.cols(), a.data(), a.cols(), 1, b.data(), b.cols(), 1, c.data(),
                         c.cols());
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: inner dimension mismatch");
  Matrix c(a.rows(), b.rows());
  kernels::active().gemm(a.rows(), b.rows(), a.cols(), a.data(), a.cols(), 1, b.data(), 1, b.cols(), c.data(),
                         c.cols());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  Matrix c(a.cols(), b.cols());
  matmul_tn_accumulate(a, b, c);
  return c;
}

void matmul_tn_accumulate(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: inner dimension mismatch");
  if (c.rows() != a.cols() || c.cols() != b.cols()) throw std::invalid_argument("matmul_tn: output shape mismatch");
  kernels::active().gemm(a.cols(), b.cols(), a.rows(), a.data(), 1, a.cols(), b.data(), b.cols(), 1, c.data(),
                         c.cols());
}

Vector column_mean(const Matrix& m) {
  Vector mean(m.cols(), 0.0);
  if (m.rows() == 0) return mean;
  for (std::size_t r = 0; r < m.rows(); ++r) kernels::axpy(1.0, m.row(r).data(), mean.data(), m.cols());
  for (double& v : mean) v /= static_cast<double>(m.rows());
  return mean;
}

double frobenius_norm(const Matrix& m) {
  return std::sqrt(kernels::dot(m.data(), m.data(), m.size()));
}

}  // namespace mvd
