#pragma once

#include <string>
#include <vector>

#include "mvd/numerics/matrix.hpp"

namespace mvd {

enum class PearsonVariant {
  RowPaired,  // per-row Pearson with the diagonal removed, averaged over rows
  Flattened,  // one Pearson over all off-diagonal entries
};

enum class HsicNorm { Frobenius, Spectral };

/// Correlation between two n x n similarity matrices over the same items.
double interview_pearson(const Matrix& a, const Matrix& b, PearsonVariant variant = PearsonVariant::RowPaired);

/// Normalized HSIC with linear (dot) kernels on the rows of y1 and y2.
double hsic(const Matrix& y1, const Matrix& y2, HsicNorm norm = HsicNorm::Frobenius);
/// Same, from precomputed Gram matrices.
double hsic_from_grams(const Matrix& k1, const Matrix& k2, HsicNorm norm = HsicNorm::Frobenius);

struct PairMetric {
  std::size_t view_a = 0;
  std::size_t view_b = 0;
  double pearson = 0.0;
  double hsic = 0.0;
};

struct DisentanglementReport {
  std::vector<PairMetric> inter_input;   // input reps, per view pair
  std::vector<PairMetric> inter_output;  // output reps, per view pair
  std::vector<PairMetric> intra;         // input vs output of the same view (view_a == view_b)
};

/// All inter/intra metrics for per-view input and output matrices over the same items.
DisentanglementReport disentanglement_report(const std::vector<Matrix>& input, const std::vector<Matrix>& output,
                                             PearsonVariant variant = PearsonVariant::RowPaired);

}  // namespace mvd
