#include "mvd/numerics/kernels.hpp"

#include <cmath>

namespace mvd::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
                 const double* b, std::size_t b_rs, std::size_t b_cs, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = c[i * ldc + j];
      for (std::size_t p = 0; p < k; ++p) acc = std::fma(a[i * a_rs + p * a_cs], b[p * b_rs + j * b_cs], acc);
      c[i * ldc + j] = acc;
    }
  }
}

constexpr KernelTable kScalar{Backend::Scalar, "scalar", dot_scalar, axpy_scalar, squared_distance_scalar,
                              gemm_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace mvd::kernels
