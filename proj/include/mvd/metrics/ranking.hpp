#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "mvd/retrieval/intent.hpp"

namespace mvd {

/// Average precision over the top-k prefix, normalized by min(k, |relevant|).
double map_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, std::size_t k);
/// Reciprocal rank of the first relevant item within the top k, else 0.
double mrr_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, std::size_t k);

/// Smallest standardized homogeneity accepted before inversion.
inline constexpr double kDiversityFloor = 1e-6;

/// delta_m = 1 / max(beta_m, 1e-6), beta computed as for intent with the result set as the collection.
Vector diversity(std::span<const Matrix> result_reps, const ViewStats& stats);

}  // namespace mvd
