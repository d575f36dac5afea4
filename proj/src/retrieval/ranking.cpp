#include "mvd/retrieval/ranking.hpp"

#include <algorithm>
#include <stdexcept>

namespace mvd {

RankingMode parse_ranking_mode(std::string_view text, std::span<const std::string> view_names) {
  if (text == "input-uniform") return {RankingMode::Kind::InputUniform, 0};
  if (text == "input-output") return {RankingMode::Kind::InputOutput, 0};
  if (text == "output-output") return {RankingMode::Kind::OutputOutput, 0};
  if (text.starts_with("single:")) {
    const auto name = text.substr(7);
    for (std::size_t m = 0; m < view_names.size(); ++m)
      if (view_names[m] == name) return RankingMode::single(m);
    throw std::invalid_argument("unknown view in mode: " + std::string(name));
  }
  throw std::invalid_argument("unknown ranking mode: " + std::string(text));
}

std::string to_string(const RankingMode& mode, std::span<const std::string> view_names) {
  switch (mode.kind) {
    case RankingMode::Kind::InputUniform: return "input-uniform";
    case RankingMode::Kind::InputOutput: return "input-output";
    case RankingMode::Kind::OutputOutput: return "output-output";
    case RankingMode::Kind::SingleView:
      return "single:" + (mode.view < view_names.size() ? view_names[mode.view] : std::to_string(mode.view));
  }
  return "?";
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids.begin());
}

Collection Corpus::members(std::span<const std::string> member_ids, bool output_reps) const {
  std::vector<std::size_t> rows;
  for (const auto& id : member_ids) {
    auto idx = index_of(id);
    if (!idx) throw std::invalid_argument("collection member not in corpus: " + id);
    rows.push_back(*idx);
  }
  Collection c;
  c.member_ids.assign(member_ids.begin(), member_ids.end());
  for (const auto& m : output_reps ? output : input) c.reps.push_back(m.gather_rows(rows));
  return c;
}

double score(std::span<const Vector> query, std::span<const std::span<const double>> candidate,
             std::span<const double> alpha, std::span<const SimilarityKind> kinds, Vector* per_view) {
  if (query.size() != candidate.size() || query.size() != alpha.size() || query.size() != kinds.size()) {
    throw std::invalid_argument("score: view count mismatch");
  }
  double s = 0.0;
  if (per_view != nullptr) per_view->assign(query.size(), 0.0);
  for (std::size_t m = 0; m < query.size(); ++m) {
    const double sim = similarity(query[m], candidate[m], kinds[m]);
    if (per_view != nullptr) (*per_view)[m] = sim;
    s += alpha[m] * sim;
  }
  return s;
}

RankedList rank_query(std::span<const Vector> query, std::span<const double> alpha, const Corpus& corpus,
                      bool output_reps, const std::set<std::string>& exclude, std::optional<std::size_t> top_k) {
  if (corpus.size() == 0) throw std::invalid_argument("rank: empty corpus");
  const auto& reps = output_reps ? corpus.output : corpus.input;
  std::vector<SimilarityKind> kinds =
      output_reps ? std::vector<SimilarityKind>(reps.size(), SimilarityKind::Dot) : corpus.input_kinds;
  for (std::size_t m = 0; m < reps.size(); ++m) {
    if (query[m].size() != reps[m].cols()) throw std::invalid_argument("rank: query dim mismatch");
  }

  RankedList out;
  out.alpha.assign(alpha.begin(), alpha.end());
  std::vector<std::span<const double>> cand(reps.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (exclude.contains(corpus.ids[i])) continue;
    for (std::size_t m = 0; m < reps.size(); ++m) cand[m] = reps[m].row(i);
    RankedItem item{corpus.ids[i], i, 0.0, {}};
    item.score = score(query, cand, alpha, kinds, &item.per_view_sim);
    out.items.push_back(std::move(item));
  }
  auto before = [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  if (top_k && *top_k < out.items.size()) {
    std::partial_sort(out.items.begin(), out.items.begin() + static_cast<std::ptrdiff_t>(*top_k), out.items.end(),
                      before);
    out.items.resize(*top_k);
  } else {
    std::sort(out.items.begin(), out.items.end(), before);
  }
  return out;
}

RankedList rank(std::span<const std::string> member_ids, const Corpus& corpus, const RankingMode& mode,
                std::optional<std::size_t> top_k, bool renormalize) {
  if (corpus.size() == 0) throw std::invalid_argument("rank: empty corpus");
  const std::size_t views = corpus.input.size();
  const bool output_sims = mode.kind == RankingMode::Kind::OutputOutput;

  Vector alpha(views, 1.0 / static_cast<double>(views));
  std::optional<IntentWeights> inferred;
  if (mode.kind == RankingMode::Kind::InputOutput || mode.kind == RankingMode::Kind::OutputOutput) {
    const Collection out_members = corpus.members(member_ids, true);
    inferred = intent(raw_intent(out_members.reps), corpus.output_stats);
    alpha = inferred->alpha;
  } else if (mode.kind == RankingMode::Kind::SingleView) {
    if (mode.view >= views) throw std::invalid_argument("rank: single-view index out of range");
    std::fill(alpha.begin(), alpha.end(), 0.0);
    alpha[mode.view] = 1.0;
  }
  const Collection members = corpus.members(member_ids, output_sims);
  const CollectionRep rep = collection_rep(members.reps, renormalize);
  const std::set<std::string> exclude(member_ids.begin(), member_ids.end());
  RankedList out = rank_query(rep.centroid, alpha, corpus, output_sims, exclude, top_k);
  out.intent = std::move(inferred);
  return out;
}

Composition compose(std::span<const CollectionRep> sources, std::span<const std::set<std::size_t>> selections) {
  if (sources.empty() || sources.size() != selections.size()) throw std::invalid_argument("compose: bad sources");
  const std::size_t views = sources.front().centroid.size();
  std::vector<int> owner(views, -1);
  for (std::size_t s = 0; s < selections.size(); ++s) {
    if (sources[s].centroid.size() != views) throw std::invalid_argument("compose: sources disagree on views");
    for (std::size_t m : selections[s]) {
      if (m >= views) throw std::invalid_argument("compose: selected view out of range");
      if (owner[m] != -1) throw std::invalid_argument("compose: view selected by more than one source");
      owner[m] = static_cast<int>(s);
    }
  }
  const auto selected = static_cast<std::size_t>(std::count_if(owner.begin(), owner.end(), [](int o) { return o >= 0; }));
  if (selected == 0) throw std::invalid_argument("compose: no view selected");

  Composition c;
  c.weights.alpha.assign(views, 0.0);
  for (std::size_t m = 0; m < views; ++m) {
    if (owner[m] >= 0) {
      c.rep.centroid.push_back(sources[static_cast<std::size_t>(owner[m])].centroid[m]);
      c.weights.alpha[m] = 1.0 / static_cast<double>(selected);
    } else {
      Vector avg(sources.front().centroid[m].size(), 0.0);
      for (const auto& src : sources)
        for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += src.centroid[m][k];
      for (double& v : avg) v /= static_cast<double>(sources.size());
      c.rep.centroid.push_back(std::move(avg));
    }
  }
  return c;
}

Composition compose(std::span<const ComposeSource> sources, const Corpus& corpus, bool renormalize) {
  std::vector<CollectionRep> reps;
  std::vector<std::set<std::size_t>> selections;
  for (const auto& s : sources) {
    reps.push_back(collection_rep(corpus.members(s.member_ids, true).reps, renormalize));
    selections.push_back(s.selected_views);
  }
  return compose(reps, selections);
}

RankedList rank_composition(std::span<const ComposeSource> sources, const Corpus& corpus,
                            std::optional<std::size_t> top_k, bool renormalize) {
  const Composition c = compose(sources, corpus, renormalize);
  std::set<std::string> exclude;
  for (const auto& s : sources) exclude.insert(s.member_ids.begin(), s.member_ids.end());
  return rank_query(c.rep.centroid, c.weights.alpha, corpus, true, exclude, top_k);
}

}  // namespace mvd
