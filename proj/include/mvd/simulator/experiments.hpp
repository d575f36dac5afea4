#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mvd/dataio/checkpoint.hpp"
#include "mvd/dataio/dataset.hpp"
#include "mvd/metrics/disentanglement.hpp"
#include "mvd/model/config.hpp"
#include "mvd/model/params.hpp"
#include "mvd/retrieval/ranking.hpp"

namespace mvd {

struct SimProtocol {
  std::size_t collections = 100;  // per configuration
  std::size_t min_size = 10;
  std::size_t max_size = 30;
  std::size_t k = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Pairs drawn for corpus similarity statistics.
inline constexpr std::size_t kDefaultStatPairs = 100000;

/// A retrieval corpus built from one split of a dataset and a trained model.
struct EvalContext {
  const MultiViewDataset* dataset = nullptr;
  std::vector<std::size_t> rows;  // dataset rows, in corpus order
  Corpus corpus;
  std::vector<std::string> attributes;
  std::vector<std::size_t> attribute_view;  // correlated view per attribute, or npos

  const Labels& labels(std::size_t corpus_index) const { return dataset->labels[rows[corpus_index]]; }
};

EvalContext make_eval_context(const MultiViewDataset& dataset, const ModelConfig& config, const ModelParams& params,
                              Split split, std::uint64_t seed, std::size_t stat_pairs = kDefaultStatPairs);
/// Corpus over explicit dataset rows; `exact_stats` enumerates every pair instead of sampling.
EvalContext make_eval_context(const MultiViewDataset& dataset, const ModelConfig& config, const ModelParams& params,
                              std::vector<std::size_t> rows, std::uint64_t seed,
                              std::size_t stat_pairs = kDefaultStatPairs, bool exact_stats = false);

/// Single-view baselines followed by input-uniform, input-output and output-output.
std::vector<RankingMode> all_variants(std::size_t views);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sample std / sqrt(n)
};
MeanSe mean_se(std::span<const double> values);

// ---- intent vs purity -------------------------------------------------------

struct PurityPoint {
  double purity = 0.0;
  std::vector<MeanSe> alpha;           // per view
  std::vector<double> argmax_fraction;  // per view: share of collections where it had the largest alpha
};

struct PurityCurve {
  std::string attribute;
  std::size_t correlated_view = 0;
  std::vector<PurityPoint> points;
  std::vector<double> spearman;  // per view, mean alpha against purity
};

struct PurityReport {
  std::vector<std::string> view_names;
  SimProtocol protocol;
  std::vector<PurityCurve> curves;
};

/// {0, 0.1, ..., 1.0}
std::vector<double> default_purity_grid();

/// Mean output-representation intent per view for random-class collections at each purity.
PurityReport purity_curve(const EvalContext& ctx, const SimProtocol& protocol, std::span<const double> grid,
                          std::size_t threads = 1);

// ---- ranking benchmark and diversity ------------------------------------------

struct VariantScores {
  std::string variant;
  MeanSe map;
  MeanSe mrr;
  std::vector<MeanSe> delta;  // per view
};

struct ScoreBlock {
  std::string attribute;  // "aggregate" for the mixed block
  std::vector<VariantScores> variants;

  const VariantScores& at(std::string_view variant) const;
};

struct BenchmarkReport {
  std::vector<std::string> view_names;
  SimProtocol protocol;
  std::vector<ScoreBlock> per_attribute;
  ScoreBlock aggregate;
};

/// MAP/MRR@k (and diversity) per variant over pure collections of random classes;
/// the aggregate block also draws the attribute at random per collection.
BenchmarkReport run_benchmark(const EvalContext& ctx, const SimProtocol& protocol,
                              std::span<const RankingMode> variants, std::size_t threads = 1);

/// Per-attribute MAP and diversity per variant; same protocol as the benchmark without the aggregate block.
BenchmarkReport diversity_study(const EvalContext& ctx, const SimProtocol& protocol,
                                std::span<const RankingMode> variants, std::size_t threads = 1);

// ---- composition ------------------------------------------------------------

struct CompositionTrial {
  std::string attribute_a, class_a;
  std::string attribute_b, class_b;
  std::size_t joint_relevant = 0;
  double map_composed = 0.0;
  double map_source_a = 0.0;
  double map_source_b = 0.0;
  bool success = false;  // composed beats both sources
};

struct CompositionReport {
  std::size_t k = 20;
  std::vector<CompositionTrial> trials;
  double success_rate = 0.0;
};

/// Two pure sources on different attributes; each contributes its attribute's view.
/// Relevance is the joint label (class_a and class_b).
CompositionReport composition_study(const EvalContext& ctx, const SimProtocol& protocol, std::size_t trials,
                                    std::size_t k = 20, std::size_t threads = 1);

// ---- lambda_2 sweep ------------------------------------------------------------

struct Histogram {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;
};

inline constexpr std::size_t kHistogramBins = 50;

/// Pairwise dot similarities of the rows: all pairs up to 2000 rows, else `sample_pairs` seeded pairs.
Histogram similarity_histogram(const Matrix& reps, std::uint64_t seed, std::size_t bins = kHistogramBins,
                               std::size_t sample_pairs = kDefaultStatPairs);

struct SweepPoint {
  double lambda2 = 0.0;
  DisentanglementReport metrics;  // on the validation split
  LossBreakdown final_train;
  LossBreakdown final_val;
  std::vector<Histogram> output_histograms;  // per view
};

struct SweepReport {
  std::vector<std::string> view_names;
  std::vector<Histogram> input_histograms;  // per view
  std::vector<SweepPoint> points;
};

/// Trains one model per lambda_2 from the same initialization; other settings come from `base`.
/// Trained checkpoints are returned through `models` when given.
SweepReport lambda_sweep(const MultiViewDataset& dataset, const ModelConfig& base,
                         std::span<const double> lambda2_values, std::size_t threads = 1,
                         std::vector<Checkpoint>* models = nullptr);

}  // namespace mvd
