#include "mvd/simulator/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "mvd/metrics/ranking.hpp"
#include "mvd/model/network.hpp"
#include "mvd/model/trainer.hpp"
#include "mvd/numerics/kernels.hpp"
#include "mvd/numerics/ops.hpp"
#include "mvd/numerics/random.hpp"
#include "mvd/simulator/parallel.hpp"
#include "mvd/simulator/synthetic.hpp"

namespace mvd {

namespace {

constexpr std::size_t kNoView = static_cast<std::size_t>(-1);

// Stream tags keep the seeds of different experiments apart.
constexpr std::uint64_t kPurityStream = 0x7075;
constexpr std::uint64_t kBenchmarkStream = 0x626d;
constexpr std::uint64_t kAggregateStream = 0x6167;
constexpr std::uint64_t kCompositionStream = 0x636f;

std::uint64_t seed_for(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = base;
  for (std::uint64_t p : path) s = derive_seed(s, p);
  return s;
}

struct Drawn {
  std::string cls;
  std::vector<std::string> member_ids;
};

std::map<std::string, std::size_t> class_counts(const EvalContext& ctx, const std::string& attribute) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < ctx.rows.size(); ++i) {
    auto it = ctx.labels(i).find(attribute);
    if (it != ctx.labels(i).end()) ++counts[it->second];
  }
  return counts;
}

// Random size and a random class with enough items for the target share.
Drawn draw_collection(const EvalContext& ctx, const SimProtocol& protocol, const std::string& attribute,
                      double purity, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(protocol.min_size, protocol.max_size);
  const std::size_t size = size_dist(rng);
  const auto needed = static_cast<std::size_t>(std::llround(purity * static_cast<double>(size)));
  std::vector<std::string> eligible;
  for (const auto& [cls, count] : class_counts(ctx, attribute))
    if (count >= std::max<std::size_t>(needed, 1)) eligible.push_back(cls);
  if (eligible.empty()) throw std::invalid_argument("no class of '" + attribute + "' can fill a collection");
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  Drawn d;
  d.cls = eligible[pick(rng)];
  const auto members =
      simulate_collection(*ctx.dataset, ctx.rows, attribute, d.cls, size, purity, derive_seed(seed, 1));
  for (std::size_t r : members) d.member_ids.push_back(ctx.dataset->item_ids[r]);
  return d;
}

std::set<std::string> relevant_ids(const EvalContext& ctx, const std::vector<std::pair<std::string, std::string>>& labels,
                                   const std::set<std::string>& exclude) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < ctx.rows.size(); ++i) {
    const Labels& l = ctx.labels(i);
    bool match = true;
    for (const auto& [attr, cls] : labels) {
      auto it = l.find(attr);
      if (it == l.end() || it->second != cls) {
        match = false;
        break;
      }
    }
    if (match && !exclude.contains(ctx.corpus.ids[i])) out.insert(ctx.corpus.ids[i]);
  }
  return out;
}

std::vector<std::string> ranked_ids(const RankedList& list) {
  std::vector<std::string> ids;
  ids.reserve(list.items.size());
  for (const auto& it : list.items) ids.push_back(it.id);
  return ids;
}

std::vector<Matrix> output_rows(const Corpus& corpus, const RankedList& list) {
  std::vector<std::size_t> idx;
  for (const auto& it : list.items) idx.push_back(it.index);
  std::vector<Matrix> reps;
  for (const auto& m : corpus.output) reps.push_back(m.gather_rows(idx));
  return reps;
}

struct Outcome {
  double map = 0.0;
  double mrr = 0.0;
  Vector delta;
};

Outcome evaluate(const EvalContext& ctx, const Drawn& d, const std::string& attribute, const RankingMode& mode,
                 std::size_t k) {
  const RankedList list = rank(d.member_ids, ctx.corpus, mode, k);
  const std::set<std::string> exclude(d.member_ids.begin(), d.member_ids.end());
  const auto relevant = relevant_ids(ctx, {{attribute, d.cls}}, exclude);
  const auto ids = ranked_ids(list);
  Outcome o;
  o.map = map_at_k(ids, relevant, k);
  o.mrr = mrr_at_k(ids, relevant, k);
  o.delta = diversity(output_rows(ctx.corpus, list), ctx.corpus.output_stats);
  return o;
}

ScoreBlock summarize(const std::string& name, std::span<const RankingMode> variants, const Corpus& corpus,
                     const std::vector<std::vector<Outcome>>& outcomes) {
  ScoreBlock block;
  block.attribute = name;
  const std::size_t views = corpus.view_names.size();
  for (std::size_t v = 0; v < variants.size(); ++v) {
    VariantScores s;
    s.variant = to_string(variants[v], corpus.view_names);
    std::vector<double> maps, mrrs;
    std::vector<std::vector<double>> deltas(views);
    for (const auto& per_collection : outcomes) {
      maps.push_back(per_collection[v].map);
      mrrs.push_back(per_collection[v].mrr);
      for (std::size_t m = 0; m < views; ++m) deltas[m].push_back(per_collection[v].delta[m]);
    }
    s.map = mean_se(maps);
    s.mrr = mean_se(mrrs);
    for (const auto& d : deltas) s.delta.push_back(mean_se(d));
    block.variants.push_back(std::move(s));
  }
  return block;
}

BenchmarkReport benchmark_impl(const EvalContext& ctx, const SimProtocol& protocol,
                               std::span<const RankingMode> variants, std::size_t threads, bool with_aggregate) {
  protocol.validate();
  if (variants.empty()) throw std::invalid_argument("run_benchmark: no variants");
  if (ctx.attributes.empty()) throw std::invalid_argument("run_benchmark: dataset has no attribute labels");
  BenchmarkReport report;
  report.view_names = ctx.corpus.view_names;
  report.protocol = protocol;

  auto run_block = [&](const std::string& name, auto&& draw) {
    std::vector<std::vector<Outcome>> outcomes(protocol.collections);
    parallel_for(protocol.collections, threads, [&](std::size_t j) {
      auto [attribute, d] = draw(j);
      for (const auto& mode : variants) outcomes[j].push_back(evaluate(ctx, d, attribute, mode, protocol.k));
    });
    return summarize(name, variants, ctx.corpus, outcomes);
  };

  for (std::size_t a = 0; a < ctx.attributes.size(); ++a) {
    const std::string& attribute = ctx.attributes[a];
    report.per_attribute.push_back(run_block(attribute, [&](std::size_t j) {
      const auto seed = seed_for(protocol.seed, {kBenchmarkStream, a, j});
      return std::pair{attribute, draw_collection(ctx, protocol, attribute, 1.0, seed)};
    }));
  }
  if (with_aggregate) {
    report.aggregate = run_block("aggregate", [&](std::size_t j) {
      const auto seed = seed_for(protocol.seed, {kAggregateStream, j});
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<std::size_t> pick(0, ctx.attributes.size() - 1);
      const std::string& attribute = ctx.attributes[pick(rng)];
      return std::pair{attribute, draw_collection(ctx, protocol, attribute, 1.0, derive_seed(seed, 1))};
    });
  }
  return report;
}

}  // namespace

void SimProtocol::validate() const {
  if (collections < 1) throw std::invalid_argument("SimProtocol: collections must be >= 1");
  if (min_size < 2 || max_size < min_size) throw std::invalid_argument("SimProtocol: size range must satisfy 2 <= min <= max");
  if (k < 1) throw std::invalid_argument("SimProtocol: k must be >= 1");
}

EvalContext make_eval_context(const MultiViewDataset& dataset, const ModelConfig& config, const ModelParams& params,
                              Split split, std::uint64_t seed, std::size_t stat_pairs) {
  auto rows = dataset.indices(split);
  if (rows.size() < 2) {
    throw std::invalid_argument("make_eval_context: split '" + std::string(to_string(split)) + "' has fewer than 2 items");
  }
  return make_eval_context(dataset, config, params, std::move(rows), seed, stat_pairs);
}

EvalContext make_eval_context(const MultiViewDataset& dataset, const ModelConfig& config, const ModelParams& params,
                              std::vector<std::size_t> rows, std::uint64_t seed, std::size_t stat_pairs,
                              bool exact_stats) {
  if (rows.size() < 2) throw std::invalid_argument("make_eval_context: corpus needs at least 2 items");
  EvalContext ctx;
  ctx.dataset = &dataset;
  ctx.rows = std::move(rows);
  Corpus& c = ctx.corpus;
  for (std::size_t r : ctx.rows) c.ids.push_back(dataset.item_ids[r]);
  for (const auto& v : dataset.views) {
    c.view_names.push_back(v.name);
    c.input_kinds.push_back(v.sim_kind_input);
  }
  c.input = gather_features(dataset, ctx.rows);
  c.output = embed(config, params, c.input).z_specific;
  c.output_stats = corpus_stats(c.output, stat_pairs, seed, exact_stats);
  ctx.attributes = dataset.attributes();
  for (const auto& a : ctx.attributes) {
    auto it = dataset.attribute_views.find(a);
    ctx.attribute_view.push_back(it == dataset.attribute_views.end() ? kNoView : dataset.view_index(it->second));
  }
  return ctx;
}

std::vector<RankingMode> all_variants(std::size_t views) {
  std::vector<RankingMode> out;
  for (std::size_t m = 0; m < views; ++m) out.push_back(RankingMode::single(m));
  out.push_back({RankingMode::Kind::InputUniform, 0});
  out.push_back({RankingMode::Kind::InputOutput, 0});
  out.push_back({RankingMode::Kind::OutputOutput, 0});
  return out;
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  for (double v : values) r.mean += v;
  r.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return r;
}

std::vector<double> default_purity_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

PurityReport purity_curve(const EvalContext& ctx, const SimProtocol& protocol, std::span<const double> grid,
                          std::size_t threads) {
  protocol.validate();
  if (grid.empty()) throw std::invalid_argument("purity_curve: empty purity grid");
  for (double p : grid)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("purity_curve: purity values must lie in [0,1]");
  const std::size_t views = ctx.corpus.view_names.size();
  PurityReport report;
  report.view_names = ctx.corpus.view_names;
  report.protocol = protocol;

  for (std::size_t a = 0; a < ctx.attributes.size(); ++a) {
    PurityCurve curve;
    curve.attribute = ctx.attributes[a];
    curve.correlated_view = ctx.attribute_view[a];
    std::vector<Vector> alphas(grid.size() * protocol.collections);
    parallel_for(alphas.size(), threads, [&](std::size_t t) {
      const std::size_t p = t / protocol.collections;
      const std::size_t j = t % protocol.collections;
      const auto seed = seed_for(protocol.seed, {kPurityStream, a, p, j});
      const Drawn d = draw_collection(ctx, protocol, curve.attribute, grid[p], seed);
      const Collection members = ctx.corpus.members(d.member_ids, true);
      alphas[t] = intent(raw_intent(members.reps), ctx.corpus.output_stats).alpha;
    });
    std::vector<std::vector<double>> mean_by_view(views);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      PurityPoint point;
      point.purity = grid[p];
      point.argmax_fraction.assign(views, 0.0);
      std::vector<std::vector<double>> per_view(views);
      for (std::size_t j = 0; j < protocol.collections; ++j) {
        const Vector& alpha = alphas[p * protocol.collections + j];
        for (std::size_t m = 0; m < views; ++m) per_view[m].push_back(alpha[m]);
        const auto best = static_cast<std::size_t>(std::max_element(alpha.begin(), alpha.end()) - alpha.begin());
        point.argmax_fraction[best] += 1.0 / static_cast<double>(protocol.collections);
      }
      for (std::size_t m = 0; m < views; ++m) {
        point.alpha.push_back(mean_se(per_view[m]));
        mean_by_view[m].push_back(point.alpha.back().mean);
      }
      curve.points.push_back(std::move(point));
    }
    for (std::size_t m = 0; m < views; ++m) {
      curve.spearman.push_back(grid.size() > 1 ? spearman(grid, mean_by_view[m]).r : 0.0);
    }
    report.curves.push_back(std::move(curve));
  }
  return report;
}

const VariantScores& ScoreBlock::at(std::string_view variant) const {
  for (const auto& v : variants)
    if (v.variant == variant) return v;
  throw std::out_of_range("ScoreBlock: no variant '" + std::string(variant) + "'");
}

BenchmarkReport run_benchmark(const EvalContext& ctx, const SimProtocol& protocol,
                              std::span<const RankingMode> variants, std::size_t threads) {
  return benchmark_impl(ctx, protocol, variants, threads, true);
}

BenchmarkReport diversity_study(const EvalContext& ctx, const SimProtocol& protocol,
                                std::span<const RankingMode> variants, std::size_t threads) {
  return benchmark_impl(ctx, protocol, variants, threads, false);
}

CompositionReport composition_study(const EvalContext& ctx, const SimProtocol& protocol, std::size_t trials,
                                    std::size_t k, std::size_t threads) {
  protocol.validate();
  if (trials < 1 || k < 1) throw std::invalid_argument("composition_study: trials and k must be >= 1");
  std::vector<std::size_t> usable;  // attributes with a known correlated view
  for (std::size_t a = 0; a < ctx.attributes.size(); ++a)
    if (ctx.attribute_view[a] != kNoView) usable.push_back(a);
  if (usable.size() < 2) throw std::invalid_argument("composition_study: needs two attributes mapped to views");

  CompositionReport report;
  report.k = k;
  report.trials.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto seed = seed_for(protocol.seed, {kCompositionStream, t});
    std::mt19937_64 rng(seed);
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt == 100) throw std::runtime_error("composition_study: no attribute pair with joint items");
      std::vector<std::size_t> pair = usable;
      std::shuffle(pair.begin(), pair.end(), rng);
      const std::size_t a = pair[0], b = pair[1];
      if (ctx.attribute_view[a] == ctx.attribute_view[b]) continue;
      const Drawn da = draw_collection(ctx, protocol, ctx.attributes[a], 1.0, derive_seed(seed, 2 * attempt + 1));
      const Drawn db = draw_collection(ctx, protocol, ctx.attributes[b], 1.0, derive_seed(seed, 2 * attempt + 2));
      std::set<std::string> exclude(da.member_ids.begin(), da.member_ids.end());
      exclude.insert(db.member_ids.begin(), db.member_ids.end());
      if (exclude.size() != da.member_ids.size() + db.member_ids.size()) continue;  // overlapping sources
      const auto relevant = relevant_ids(ctx, {{ctx.attributes[a], da.cls}, {ctx.attributes[b], db.cls}}, exclude);
      if (relevant.empty()) continue;

      auto own_map = [&](const Drawn& d) {
        const Collection members = ctx.corpus.members(d.member_ids, true);
        const CollectionRep rep = collection_rep(members.reps);
        const Vector alpha = intent(raw_intent(members.reps), ctx.corpus.output_stats).alpha;
        return map_at_k(ranked_ids(rank_query(rep.centroid, alpha, ctx.corpus, true, exclude, k)), relevant, k);
      };
      const std::vector<ComposeSource> sources{{da.member_ids, {ctx.attribute_view[a]}},
                                               {db.member_ids, {ctx.attribute_view[b]}}};
      CompositionTrial& trial = report.trials[t];
      trial.attribute_a = ctx.attributes[a];
      trial.class_a = da.cls;
      trial.attribute_b = ctx.attributes[b];
      trial.class_b = db.cls;
      trial.joint_relevant = relevant.size();
      trial.map_composed = map_at_k(ranked_ids(rank_composition(sources, ctx.corpus, k)), relevant, k);
      trial.map_source_a = own_map(da);
      trial.map_source_b = own_map(db);
      trial.success = trial.map_composed > trial.map_source_a && trial.map_composed > trial.map_source_b;
      return;
    }
  });
  double wins = 0.0;
  for (const auto& t : report.trials) wins += t.success ? 1.0 : 0.0;
  report.success_rate = wins / static_cast<double>(trials);
  return report;
}

Histogram similarity_histogram(const Matrix& reps, std::uint64_t seed, std::size_t bins, std::size_t sample_pairs) {
  if (bins < 1) throw std::invalid_argument("similarity_histogram: bins must be >= 1");
  if (reps.rows() < 2) throw std::invalid_argument("similarity_histogram: need at least two rows");
  Histogram h;
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  auto add = [&](std::size_t i, std::size_t j) {
    const double s = kernels::dot(reps.row(i).data(), reps.row(j).data(), reps.cols());
    const auto b = static_cast<long long>(std::floor((s - h.lo) / width));
    h.counts[static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1))]++;
  };
  const std::size_t n = reps.rows();
  if (n <= 2000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) add(i, j);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < sample_pairs; ++s) {
      std::size_t i = pick(rng), j = pick(rng);
      while (j == i) j = pick(rng);
      add(i, j);
    }
  }
  return h;
}

SweepReport lambda_sweep(const MultiViewDataset& dataset, const ModelConfig& base,
                         std::span<const double> lambda2_values, std::size_t threads, std::vector<Checkpoint>* models) {
  if (lambda2_values.empty()) throw std::invalid_argument("lambda_sweep: no lambda_2 values");
  for (double l : lambda2_values)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("lambda_sweep: lambda_2 must be finite and >= 0");
  const auto val = dataset.indices(Split::Val);
  if (val.size() < 3) throw std::invalid_argument("lambda_sweep: validation split needs at least 3 items");
  const auto x = gather_features(dataset, val);

  SweepReport report;
  for (const auto& v : dataset.views) report.view_names.push_back(v.name);
  for (std::size_t m = 0; m < x.size(); ++m) report.input_histograms.push_back(similarity_histogram(x[m], base.seed));

  report.points.resize(lambda2_values.size());
  std::vector<Checkpoint> trained(lambda2_values.size());
  parallel_for(lambda2_values.size(), threads, [&](std::size_t i) {
    ModelConfig config = base;
    config.loss_weights.lambda2 = lambda2_values[i];
    TrainResult result = train(dataset, config);
    SweepPoint& point = report.points[i];
    point.lambda2 = lambda2_values[i];
    for (const auto& rec : result.final.history) {
      if (rec.split == Split::Train) point.final_train = rec.loss;
      if (rec.split == Split::Val) point.final_val = rec.loss;
    }
    const auto z = embed(config, result.final.params, x).z_specific;
    point.metrics = disentanglement_report(x, z);
    for (std::size_t m = 0; m < z.size(); ++m) point.output_histograms.push_back(similarity_histogram(z[m], base.seed));
    trained[i] = std::move(result.final);
  });
  if (models) *models = std::move(trained);
  return report;
}

}  // namespace mvd
