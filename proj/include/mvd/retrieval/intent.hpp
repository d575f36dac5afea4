#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvd/numerics/matrix.hpp"

namespace mvd {

/// Members of a query collection with their per-view representations (N x d_m each).
struct Collection {
  std::vector<std::string> member_ids;
  std::vector<Matrix> reps;

  std::size_t size() const noexcept { return member_ids.size(); }
};

struct CollectionRep {
  std::vector<Vector> centroid;           // per view, plain mean unless re-normalized
  std::vector<std::size_t> zero_views;    // views whose mean vanished (e.g. antipodal members)
};

struct ViewStats {
  Vector mu;
  Vector sigma;
  std::size_t sample_pair_count = 0;
  std::uint64_t seed = 0;
  bool exact = false;
};

struct IntentWeights {
  Vector alpha;
  Vector beta;      // standardized
  Vector beta_hat;  // raw mean pairwise similarity
};

/// Minimum sigma accepted from corpus statistics.
inline constexpr double kDegenerateSigma = 1e-9;

/// `renormalize` scales each non-vanishing centroid to unit L2 norm.
CollectionRep collection_rep(std::span<const Matrix> reps, bool renormalize = false);

/// Mean similarity over ordered pairs i != j, per view.
Vector raw_intent(std::span<const Matrix> reps);

/// Pairwise-similarity mean and Bessel-corrected std per view, from
/// `sample_pairs` seeded uniform distinct pairs or from every unordered pair.
ViewStats corpus_stats(std::span<const Matrix> corpus, std::size_t sample_pairs, std::uint64_t seed,
                       bool exact = false);

/// beta = (beta_hat - mu) / sigma, alpha = softmax(beta).
IntentWeights intent(std::span<const double> beta_hat, const ViewStats& stats);

/// Standardized homogeneity per view (the beta of `intent`).
Vector standardized_homogeneity(std::span<const Matrix> reps, const ViewStats& stats);

}  // namespace mvd
