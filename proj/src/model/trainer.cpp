#include "mvd/model/trainer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "mvd/model/adam.hpp"
#include "mvd/numerics/random.hpp"

namespace mvd {
namespace {

void accumulate(LossBreakdown& sum, const LossBreakdown& l, double weight) {
  sum.ali += weight * l.ali;
  sum.spc += weight * l.spc;
  sum.inf += weight * l.inf;
  sum.rec += weight * l.rec;
  sum.total += weight * l.total;
}

LossBreakdown mean_of(const LossBreakdown& sum, std::size_t n) {
  const double d = static_cast<double>(n);
  return {sum.ali / d, sum.spc / d, sum.inf / d, sum.rec / d, sum.total / d};
}

}  // namespace

std::vector<Matrix> gather_features(const MultiViewDataset& dataset, std::span<const std::size_t> indices) {
  std::vector<Matrix> out;
  out.reserve(dataset.view_count());
  for (const auto& f : dataset.features) out.push_back(f.gather_rows(indices));
  return out;
}

Trainer::Trainer(const MultiViewDataset& dataset, const ModelConfig& config) : dataset_(&dataset) {
  config.validate();
  state_.config = config;
  state_.params = init_params(config, config.seed);
  state_.optimizer = AdamState::zeros_like(config);
  state_.rng_seed = config.seed;
  bind();
}

Trainer::Trainer(const MultiViewDataset& dataset, Checkpoint resume) : dataset_(&dataset), state_(std::move(resume)) {
  state_.config.validate();
  bind();
}

void Trainer::bind() {
  if (dataset_->views.size() != state_.config.views.size()) throw std::invalid_argument("Trainer: view count mismatch");
  for (std::size_t m = 0; m < state_.config.views.size(); ++m) {
    if (dataset_->views[m].input_dim != state_.config.views[m].input_dim) {
      throw std::invalid_argument("Trainer: dataset dims do not match model config");
    }
  }
  train_ = dataset_->indices(Split::Train);
  val_ = dataset_->indices(Split::Val);
  if (train_.empty()) throw std::invalid_argument("Trainer: empty train split");
  steps_per_epoch_ = (train_.size() + state_.config.batch_size - 1) / state_.config.batch_size;
}

std::vector<std::size_t> Trainer::epoch_order(std::size_t epoch) const {
  std::vector<std::size_t> order = train_;
  std::mt19937_64 rng(derive_seed(state_.config.seed, epoch + 1));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<Matrix> Trainer::gather(std::span<const std::size_t> indices) const {
  return gather_features(*dataset_, indices);
}

void Trainer::step() {
  if (finished()) return;
  const std::size_t step = static_cast<std::size_t>(state_.optimizer.step);
  const std::size_t epoch = step / steps_per_epoch_;
  const std::size_t batch = step % steps_per_epoch_;
  if (cached_epoch_ != epoch) {
    cached_order_ = epoch_order(epoch);
    cached_epoch_ = epoch;
  }
  const std::size_t bs = state_.config.batch_size;
  const std::size_t begin = batch * bs;
  const std::size_t end = std::min(begin + bs, cached_order_.size());
  const std::span<const std::size_t> idx(cached_order_.data() + begin, end - begin);

  const auto x = gather(idx);
  auto g = loss_and_gradient(state_.config, state_.params, x, state_.config.loss_weights);
  adam_step(state_.params, g.grads, state_.optimizer, state_.config.learning_rate);
  accumulate(state_.partial_epoch.weighted_sum, g.loss, static_cast<double>(idx.size()));
  state_.partial_epoch.items += idx.size();

  if (batch + 1 == steps_per_epoch_) close_epoch(epoch);
}

void Trainer::close_epoch(std::size_t epoch) {
  EpochRecord train{epoch, Split::Train, mean_of(state_.partial_epoch.weighted_sum, state_.partial_epoch.items)};
  state_.partial_epoch = {};
  state_.history.push_back(train);
  const EpochRecord* val_ptr = nullptr;
  if (!val_.empty()) {
    state_.history.push_back({epoch, Split::Val, evaluate(val_)});
    val_ptr = &state_.history.back();
  }
  if (callback_) callback_(*this, train, val_ptr);
}

void Trainer::run(const EpochCallback& on_epoch) {
  callback_ = on_epoch;
  while (!finished()) step();
  callback_ = {};
}

LossBreakdown Trainer::evaluate(std::span<const std::size_t> indices) const {
  LossBreakdown sum;
  if (indices.empty()) return sum;
  const std::size_t bs = state_.config.batch_size;
  for (std::size_t begin = 0; begin < indices.size(); begin += bs) {
    const std::size_t end = std::min(begin + bs, indices.size());
    const auto x = gather(indices.subspan(begin, end - begin));
    const auto cache = forward_cached(state_.config, state_.params, x);
    accumulate(sum, compute_losses(cache, state_.config.loss_weights), static_cast<double>(end - begin));
  }
  return mean_of(sum, indices.size());
}

TrainResult train(const MultiViewDataset& dataset, const ModelConfig& config) {
  Trainer trainer(dataset, config);
  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  trainer.run([&](const Trainer& t, const EpochRecord& train_rec, const EpochRecord* val) {
    const double score = val != nullptr ? val->loss.total : train_rec.loss.total;
    if (score < best) {
      best = score;
      result.best_epoch = train_rec.epoch;
      result.best_val = t.checkpoint();
    }
  });
  result.final = trainer.checkpoint();
  if (config.epochs == 0) result.best_val = result.final;
  return result;
}

}  // namespace mvd
