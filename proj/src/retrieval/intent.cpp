#include "mvd/retrieval/intent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mvd/numerics/kernels.hpp"
#include "mvd/numerics/ops.hpp"

namespace mvd {

CollectionRep collection_rep(std::span<const Matrix> reps, bool renormalize) {
  if (reps.empty() || reps.front().rows() == 0) throw std::invalid_argument("collection_rep: empty collection");
  CollectionRep out;
  for (std::size_t m = 0; m < reps.size(); ++m) {
    if (reps[m].rows() != reps.front().rows()) throw std::invalid_argument("collection_rep: views disagree on N");
    out.centroid.push_back(column_mean(reps[m]));
    auto& c = out.centroid.back();
    const double sq = kernels::dot(c.data(), c.data(), c.size());
    if (sq <= 1e-24) {
      out.zero_views.push_back(m);
    } else if (renormalize) {
      const double inv = 1.0 / std::sqrt(sq);
      for (double& v : c) v *= inv;
    }
  }
  return out;
}

Vector raw_intent(std::span<const Matrix> reps) {
  if (reps.empty()) throw std::invalid_argument("raw_intent: no views");
  const std::size_t n = reps.front().rows();
  if (n < 2) throw std::invalid_argument("raw_intent: need at least two members");
  Vector out;
  for (const auto& z : reps) {
    if (z.rows() != n) throw std::invalid_argument("raw_intent: views disagree on N");
    // sum_{i != j} z_i . z_j = ||sum_i z_i||^2 - sum_i ||z_i||^2
    Vector sum(z.cols(), 0.0);
    double self = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      kernels::axpy(1.0, z.row(i).data(), sum.data(), z.cols());
      self += kernels::dot(z.row(i).data(), z.row(i).data(), z.cols());
    }
    const double total = kernels::dot(sum.data(), sum.data(), sum.size()) - self;
    // Rows are unit (or zero) vectors, so every pairwise term lies in [-1, 1].
    out.push_back(std::clamp(total / static_cast<double>(n * (n - 1)), -1.0, 1.0));
  }
  return out;
}

ViewStats corpus_stats(std::span<const Matrix> corpus, std::size_t sample_pairs, std::uint64_t seed, bool exact) {
  if (corpus.empty()) throw std::invalid_argument("corpus_stats: no views");
  const std::size_t n = corpus.front().rows();
  if (n < 2) throw std::invalid_argument("corpus_stats: corpus needs at least two items");
  if (!exact && sample_pairs < 1000) throw std::invalid_argument("corpus_stats: sample_pairs must be >= 1000");
  ViewStats stats;
  stats.seed = seed;
  stats.exact = exact;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (exact) {
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> first(0, n - 1), second(0, n - 2);
    pairs.reserve(sample_pairs);
    for (std::size_t k = 0; k < sample_pairs; ++k) {
      const std::size_t i = first(rng);
      std::size_t j = second(rng);
      if (j >= i) ++j;
      pairs.emplace_back(i, j);
    }
  }
  stats.sample_pair_count = pairs.size();
  if (pairs.size() < 2) throw std::invalid_argument("corpus_stats: need at least two pairs");

  for (const auto& z : corpus) {
    if (z.rows() != n) throw std::invalid_argument("corpus_stats: views disagree on corpus size");
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (const auto& [i, j] : pairs) {
      const double s = kernels::dot(z.row(i).data(), z.row(j).data(), z.cols());
      ++count;
      const double delta = s - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (s - mean);
    }
    const double sigma = std::sqrt(m2 / static_cast<double>(count - 1));
    if (!(sigma >= kDegenerateSigma)) {
      throw std::domain_error("corpus_stats: degenerate corpus (pairwise similarity std below 1e-9)");
    }
    stats.mu.push_back(mean);
    stats.sigma.push_back(sigma);
  }
  return stats;
}

IntentWeights intent(std::span<const double> beta_hat, const ViewStats& stats) {
  if (beta_hat.size() != stats.mu.size() || stats.sigma.size() != stats.mu.size()) {
    throw std::invalid_argument("intent: view count mismatch with corpus stats");
  }
  IntentWeights w;
  w.beta_hat.assign(beta_hat.begin(), beta_hat.end());
  for (std::size_t m = 0; m < beta_hat.size(); ++m) {
    if (!(stats.sigma[m] >= kDegenerateSigma)) throw std::domain_error("intent: degenerate corpus stats");
    w.beta.push_back((beta_hat[m] - stats.mu[m]) / stats.sigma[m]);
  }
  w.alpha = softmax(w.beta);
  return w;
}

Vector standardized_homogeneity(std::span<const Matrix> reps, const ViewStats& stats) {
  return intent(raw_intent(reps), stats).beta;
}

}  // namespace mvd
