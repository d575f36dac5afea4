#pragma once

// Inner-loop kernels behind every dense product in the library.
//
// Each backend keeps a fixed reduction order, so a given backend is
// bit-deterministic. dot, axpy and squared_distance agree across backends
// only to rounding; gemm is one fused multiply-add chain per output entry
// in both backends and agrees bit for bit.
// The active backend is chosen once from CPU features and can be pinned
// with MVD_SIMD=scalar in the environment.

#include <cstddef>
#include <string_view>

namespace mvd::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// sum_i (a_i - b_i)^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  /// C (m x n, row stride ldc) += A B, where A(i, p) = a[i * a_rs + p * a_cs] and
  /// B(p, j) = b[p * b_rs + j * b_cs]. Each entry accumulates fma(A(i, p), B(p, j), c) for p = 0..k-1.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
               const double* b, std::size_t b_rs, std::size_t b_cs, double* c, std::size_t ldc);
};

const KernelTable& scalar_table() noexcept;
/// Only valid to call when avx2_supported() is true.
const KernelTable& avx2_table() noexcept;
bool avx2_supported() noexcept;

const KernelTable& active() noexcept;
/// Overrides the active backend for the rest of the process. Intended for
/// tests and the CLI; not thread-safe against concurrent kernel calls.
void set_backend(Backend b);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline double squared_distance(const double* a, const double* b, std::size_t n) {
  return active().squared_distance(a, b, n);
}

}  // namespace mvd::kernels
