#include "mvd/metrics/ranking.hpp"

#include <algorithm>
#include <stdexcept>

namespace mvd {

double map_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, std::size_t k) {
  if (k == 0) throw std::invalid_argument("map_at_k: k must be positive");
  if (ranked.empty()) throw std::invalid_argument("map_at_k: empty ranking");
  if (relevant.empty()) return 0.0;
  const std::size_t limit = std::min(k, ranked.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < limit; ++p) {
    if (relevant.contains(ranked[p])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
  }
  return sum / static_cast<double>(std::min(k, relevant.size()));
}

double mrr_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, std::size_t k) {
  if (k == 0) throw std::invalid_argument("mrr_at_k: k must be positive");
  if (ranked.empty()) throw std::invalid_argument("mrr_at_k: empty ranking");
  const std::size_t limit = std::min(k, ranked.size());
  for (std::size_t p = 0; p < limit; ++p)
    if (relevant.contains(ranked[p])) return 1.0 / static_cast<double>(p + 1);
  return 0.0;
}

Vector diversity(std::span<const Matrix> result_reps, const ViewStats& stats) {
  if (result_reps.empty() || result_reps.front().rows() < 2) {
    throw std::invalid_argument("diversity: result set needs at least two items");
  }
  Vector beta = standardized_homogeneity(result_reps, stats);
  for (double& b : beta) b = 1.0 / std::max(b, kDiversityFloor);
  return beta;
}

}  // namespace mvd
