#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvd/numerics/ops.hpp"
#include "mvd/retrieval/intent.hpp"

namespace mvd {

/// Which representations feed the intent weights and the similarity scores.
struct RankingMode {
  enum class Kind { InputUniform, InputOutput, OutputOutput, SingleView };
  Kind kind = Kind::OutputOutput;
  std::size_t view = 0;  // SingleView only

  static RankingMode single(std::size_t view) { return {Kind::SingleView, view}; }
  bool operator==(const RankingMode&) const = default;
};

/// Accepts "input-uniform", "input-output", "output-output" and "single:<view name>".
RankingMode parse_ranking_mode(std::string_view text, std::span<const std::string> view_names);
std::string to_string(const RankingMode& mode, std::span<const std::string> view_names);

/// Candidate pool for retrieval: the same items under input and output representations.
struct Corpus {
  std::vector<std::string> ids;
  std::vector<std::string> view_names;
  std::vector<Matrix> input;                // unit rows, per view
  std::vector<Matrix> output;               // view-specific output reps, unit rows
  std::vector<SimilarityKind> input_kinds;  // per view; output reps always use dot
  ViewStats output_stats;                   // pairwise stats of `output`

  std::size_t size() const noexcept { return ids.size(); }
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Member rows of both representations for the listed ids (throws on unknown ids).
  Collection members(std::span<const std::string> ids, bool output_reps) const;
};

struct RankedItem {
  std::string id;
  std::size_t index = 0;  // row in the corpus
  double score = 0.0;
  Vector per_view_sim;
};

struct RankedList {
  std::vector<RankedItem> items;
  Vector alpha;
  std::optional<IntentWeights> intent;  // present when weights were inferred
};

/// sum_m alpha_m * sim_m(query_m, candidate_m)
double score(std::span<const Vector> query, std::span<const std::span<const double>> candidate,
             std::span<const double> alpha, std::span<const SimilarityKind> kinds, Vector* per_view = nullptr);

/// Scores every corpus item not in `exclude` against `query` and sorts by
/// descending score, ties by ascending id. `top_k` truncates after sorting.
RankedList rank_query(std::span<const Vector> query, std::span<const double> alpha, const Corpus& corpus,
                      bool output_reps, const std::set<std::string>& exclude,
                      std::optional<std::size_t> top_k = std::nullopt);

/// Collection-as-query retrieval; the collection's members are excluded from the result.
RankedList rank(std::span<const std::string> member_ids, const Corpus& corpus, const RankingMode& mode,
                std::optional<std::size_t> top_k = std::nullopt, bool renormalize = false);

struct ComposeSource {
  std::vector<std::string> member_ids;
  std::set<std::size_t> selected_views;
};

struct Composition {
  CollectionRep rep;
  IntentWeights weights;  // alpha uniform over selected views, zero elsewhere
};

/// Selected views take that source's centroid; unselected views average all sources.
Composition compose(std::span<const CollectionRep> sources, std::span<const std::set<std::size_t>> selections);
Composition compose(std::span<const ComposeSource> sources, const Corpus& corpus, bool renormalize = false);

RankedList rank_composition(std::span<const ComposeSource> sources, const Corpus& corpus,
                            std::optional<std::size_t> top_k = std::nullopt, bool renormalize = false);

}  // namespace mvd
