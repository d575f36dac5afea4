#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mvd/numerics/matrix.hpp"

namespace mvd {

enum class SimilarityKind { Dot, InverseL2 };

/// Regularizer in 1 / (eps + ||a - b||).
inline constexpr double kInverseL2Epsilon = 1e-8;

SimilarityKind parse_similarity_kind(std::string_view s);
std::string_view to_string(SimilarityKind k);

double similarity(std::span<const double> a, std::span<const double> b, SimilarityKind kind);

struct NormalizedRows {
  Matrix values;
  std::vector<double> norms;                // pre-normalization row norms
  std::vector<std::size_t> degenerate_rows;  // rows with norm <= epsilon, emitted as zeros
};

/// Scales each row to unit L2 norm. Rows whose norm is at most `epsilon`
/// come back as zeros and are listed in `degenerate_rows`.
NormalizedRows row_normalize(const Matrix& m, double epsilon = 1e-12);

/// S(i, j) = sim(P.row(i), Q.row(j)).
Matrix matsim(const Matrix& p, const Matrix& q, SimilarityKind kind);

/// Numerically stable softmax (max subtraction).
Vector softmax(std::span<const double> v);

struct PearsonResult {
  double r = 0.0;
  bool constant = false;  // one input had zero variance; r is reported as 0
};

PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties sharing their average rank.
Vector average_ranks(std::span<const double> x);
/// Pearson correlation of the average ranks.
PearsonResult spearman(std::span<const double> x, std::span<const double> y);

/// H K H with H = I - 11^T / n.
Matrix center_gram(const Matrix& k);

// Dense products, all routed through the active kernel table.
Matrix matmul(const Matrix& a, const Matrix& b);     // A B
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // A B^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // A^T B
/// C += A^T B
void matmul_tn_accumulate(const Matrix& a, const Matrix& b, Matrix& c);

/// Mean of each column.
Vector column_mean(const Matrix& m);

double frobenius_norm(const Matrix& m);

}  // namespace mvd
