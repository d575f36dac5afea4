// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "mvd/numerics/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

#include <cmath>
#include <vector>
#define MVD_HAVE_AVX2_TU 1
#else
#define MVD_HAVE_AVX2_TU 0
#endif

namespace mvd::kernels {

#if MVD_HAVE_AVX2_TU
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Same accumulator layout and reduction order as dot_avx2, four rows at a time
// so each load of `a` feeds four FMAs.
// Register tiles of 4 rows by 8 (then 4) columns; leftover columns fall back
// to a scalar fma chain in the same order.
template <int R, int V>
inline void gemm_tile(std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs, const double* b,
                      std::size_t ldb, double* c, std::size_t ldc) {
  __m256d acc[R][V];
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < V; ++v) acc[r][v] = _mm256_loadu_pd(c + r * ldc + 4 * v);
  for (std::size_t p = 0; p < k; ++p) {
    __m256d bv[V];
    for (int v = 0; v < V; ++v) bv[v] = _mm256_loadu_pd(b + p * ldb + 4 * v);
    for (int r = 0; r < R; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * a_rs + p * a_cs);
      for (int v = 0; v < V; ++v) acc[r][v] = _mm256_fmadd_pd(av, bv[v], acc[r][v]);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < V; ++v) _mm256_storeu_pd(c + r * ldc + 4 * v, acc[r][v]);
}

// B's panel is packed contiguously first: it is reused by every row tile.
template <int V>
void gemm_panel(std::size_t m, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs, const double* b,
                std::size_t b_rs, std::size_t b_cs, double* c, std::size_t ldc, std::vector<double>& packed) {
  constexpr std::size_t w = 4 * V;
  packed.resize(k * w);
  if (b_cs == 1) {
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = 0; q < w; ++q) packed[p * w + q] = b[p * b_rs + q];
  } else {
    for (std::size_t q = 0; q < w; ++q)
      for (std::size_t p = 0; p < k; ++p) packed[p * w + q] = b[p * b_rs + q * b_cs];
  }
  std::size_t i = 0;
  for (; i + 6 <= m; i += 6) gemm_tile<6, V>(k, a + i * a_rs, a_rs, a_cs, packed.data(), w, c + i * ldc, ldc);
  const double* ai = a + i * a_rs;
  double* ci = c + i * ldc;
  switch (m - i) {
    case 5: gemm_tile<5, V>(k, ai, a_rs, a_cs, packed.data(), w, ci, ldc); break;
    case 4: gemm_tile<4, V>(k, ai, a_rs, a_cs, packed.data(), w, ci, ldc); break;
    case 3: gemm_tile<3, V>(k, ai, a_rs, a_cs, packed.data(), w, ci, ldc); break;
    case 2: gemm_tile<2, V>(k, ai, a_rs, a_cs, packed.data(), w, ci, ldc); break;
    case 1: gemm_tile<1, V>(k, ai, a_rs, a_cs, packed.data(), w, ci, ldc); break;
    default: break;
  }
}

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
               const double* b, std::size_t b_rs, std::size_t b_cs, double* c, std::size_t ldc) {
  thread_local std::vector<double> packed;
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) gemm_panel<2>(m, k, a, a_rs, a_cs, b + j * b_cs, b_rs, b_cs, c + j, ldc, packed);
  if (j + 4 <= n) {
    gemm_panel<1>(m, k, a, a_rs, a_cs, b + j * b_cs, b_rs, b_cs, c + j, ldc, packed);
    j += 4;
  }
  for (; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      double acc = c[i * ldc + j];
      for (std::size_t p = 0; p < k; ++p) acc = std::fma(a[i * a_rs + p * a_cs], b[p * b_rs + j * b_cs], acc);
      c[i * ldc + j] = acc;
    }
  }
}

constexpr KernelTable kAvx2{Backend::Avx2, "avx2", dot_avx2, axpy_avx2, squared_distance_avx2, gemm_avx2};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

#else

const KernelTable& avx2_table() noexcept { return scalar_table(); }

#endif

}  // namespace mvd::kernels
