#include "mvd/simulator/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "mvd/numerics/ops.hpp"
#include "mvd/numerics/random.hpp"

namespace mvd {

SyntheticConfig SyntheticConfig::defaults() {
  SyntheticConfig c;
  c.views = {{"object", 256, SimilarityKind::Dot, SimilarityKind::Dot},
             {"style", 128, SimilarityKind::InverseL2, SimilarityKind::Dot},
             {"color", 64, SimilarityKind::InverseL2, SimilarityKind::Dot}};
  c.attributes = {
      {"content", {"bicycle", "bird", "building", "cars", "cat", "dog", "flower", "people", "tree"}, 0},
      {"media", {"3d_graphics", "vector_art", "watercolor", "pencil_sketch", "comic", "pen_ink", "oil_paint"}, 1},
      {"emotion", {"happy", "gloomy", "scary", "peaceful"}, 2},
  };
  return c;
}

void SyntheticConfig::validate() const {
  if (views.empty()) throw std::invalid_argument("SyntheticConfig: no views");
  if (attributes.size() != views.size()) throw std::invalid_argument("SyntheticConfig: one attribute per view");
  std::set<std::size_t> used;
  for (const auto& a : attributes) {
    if (a.classes.size() < 2) throw std::invalid_argument("SyntheticConfig: class count must be >= 2");
    if (a.view >= views.size() || !used.insert(a.view).second) {
      throw std::invalid_argument("SyntheticConfig: each attribute must drive a distinct view");
    }
  }
  for (const auto& v : views)
    if (v.input_dim < 1) throw std::invalid_argument("SyntheticConfig: view dims must be >= 1");
  if (!(w_class > 0.0) || w_shared < 0.0 || w_noise < 0.0) {
    throw std::invalid_argument("SyntheticConfig: weights must be >= 0 with w_class > 0");
  }
  if (items < 1 || shared_latent_dim < 1) throw std::invalid_argument("SyntheticConfig: empty dataset");
}

MultiViewDataset generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t views = config.views.size();
  const std::size_t g_dim = config.shared_latent_dim;

  // attribute driving each view
  std::vector<std::size_t> attr_of_view(views);
  for (std::size_t a = 0; a < config.attributes.size(); ++a) attr_of_view[config.attributes[a].view] = a;

  std::vector<Matrix> centroids;
  std::vector<Matrix> projections;
  for (std::size_t m = 0; m < views; ++m) {
    const std::size_t d = config.views[m].input_dim;
    Matrix c(config.attributes[attr_of_view[m]].classes.size(), d);
    for (double& v : c.flat()) v = normal(rng);
    centroids.push_back(row_normalize(c).values);
    Matrix p(d, g_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));  // columns of unit expected norm
    for (double& v : p.flat()) v = scale * normal(rng);
    projections.push_back(std::move(p));
  }

  MultiViewDataset ds;
  ds.views = config.views;
  for (std::size_t m = 0; m < views; ++m) ds.features.emplace_back(config.items, config.views[m].input_dim);
  for (const auto& a : config.attributes) ds.attribute_views[a.name] = config.views[a.view].name;

  const int width = static_cast<int>(std::to_string(config.items).size());
  Vector g(g_dim);
  std::vector<std::size_t> cls(config.attributes.size());
  for (std::size_t i = 0; i < config.items; ++i) {
    Labels labels;
    for (std::size_t a = 0; a < config.attributes.size(); ++a) {
      std::uniform_int_distribution<std::size_t> pick(0, config.attributes[a].classes.size() - 1);
      cls[a] = pick(rng);
      labels[config.attributes[a].name] = config.attributes[a].classes[cls[a]];
    }
    for (double& v : g) v = normal(rng);
    for (std::size_t m = 0; m < views; ++m) {
      const std::size_t d = config.views[m].input_dim;
      auto row = ds.features[m].row(i);
      auto centroid = centroids[m].row(cls[attr_of_view[m]]);
      for (std::size_t k = 0; k < d; ++k) {
        double shared = 0.0;
        auto prow = projections[m].row(k);
        for (std::size_t j = 0; j < g_dim; ++j) shared += prow[j] * g[j];
        row[k] = config.w_class * centroid[k] + config.w_shared * shared + config.w_noise * normal(rng);
      }
    }
    std::string id = std::to_string(i);
    ds.item_ids.push_back("item_" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id);
    ds.labels.push_back(std::move(labels));
  }
  ds.splits = assign_splits(config.items, derive_seed(config.seed, 0x5b117), config.split_ratio);
  ingest(ds);
  return ds;
}

std::vector<std::size_t> simulate_collection(const MultiViewDataset& dataset, std::span<const std::size_t> pool,
                                             const std::string& attribute, const std::string& target_class,
                                             std::size_t size, double purity, std::uint64_t seed) {
  if (size < 2) throw std::invalid_argument("simulate_collection: size must be >= 2");
  if (!(purity >= 0.0 && purity <= 1.0)) throw std::invalid_argument("simulate_collection: purity must be in [0,1]");

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t idx : pool) {
    auto it = dataset.labels.at(idx).find(attribute);
    if (it != dataset.labels[idx].end()) by_class[it->second].push_back(idx);
  }
  if (!by_class.contains(target_class)) {
    throw std::invalid_argument("simulate_collection: class '" + target_class + "' has no items in the pool");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> members;

  auto take = [&](std::vector<std::size_t>& items, std::size_t count, const std::string& cls) {
    if (items.size() < count) {
      throw std::invalid_argument("simulate_collection: not enough items in class '" + cls + "'");
    }
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
      const std::size_t j = pick(rng);
      members.push_back(items[j]);
      items[j] = items.back();
      items.pop_back();
    }
  };

  std::vector<std::string> mixture;
  std::size_t n_target = 0;
  if (purity == 0.0) {
    for (const auto& [cls, items] : by_class) mixture.push_back(cls);
  } else {
    n_target = static_cast<std::size_t>(std::llround(purity * static_cast<double>(size)));
    take(by_class[target_class], n_target, target_class);
    for (const auto& [cls, items] : by_class)
      if (cls != target_class) mixture.push_back(cls);
  }
  const std::size_t rest = size - n_target;
  if (rest > 0 && mixture.empty()) throw std::invalid_argument("simulate_collection: no other classes to mix in");
  // Even shares across the mixture classes; the leftover slots go to randomly chosen classes.
  std::shuffle(mixture.begin(), mixture.end(), rng);
  for (std::size_t c = 0; c < mixture.size(); ++c) {
    const std::size_t count = rest / mixture.size() + (c < rest % mixture.size() ? 1 : 0);
    take(by_class[mixture[c]], count, mixture[c]);
  }
  return members;
}

}  // namespace mvd
