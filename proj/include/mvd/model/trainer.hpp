#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mvd/dataio/checkpoint.hpp"
#include "mvd/dataio/dataset.hpp"
#include "mvd/model/network.hpp"

namespace mvd {

/// Mini-batch Adam over the train split. Batch order for epoch e is a
/// permutation seeded from (config.seed, e), so training can stop and
/// resume at any step and still follow the uninterrupted trajectory.
class Trainer {
 public:
  using EpochCallback = std::function<void(const Trainer&, const EpochRecord& train, const EpochRecord* val)>;

  Trainer(const MultiViewDataset& dataset, const ModelConfig& config);
  Trainer(const MultiViewDataset& dataset, Checkpoint resume);

  std::size_t steps_per_epoch() const noexcept { return steps_per_epoch_; }
  std::size_t total_steps() const noexcept { return steps_per_epoch_ * state_.config.epochs; }
  std::uint64_t steps_done() const noexcept { return state_.optimizer.step; }
  bool finished() const noexcept { return steps_done() >= total_steps(); }

  /// One optimizer step on the next batch. Closes the epoch when it was the last batch.
  void step();
  void run(const EpochCallback& on_epoch = {});

  const Checkpoint& checkpoint() const noexcept { return state_; }

  /// Weighted mean loss over `indices`, evaluated in batches of config.batch_size.
  LossBreakdown evaluate(std::span<const std::size_t> indices) const;

 private:
  void bind();
  std::vector<std::size_t> epoch_order(std::size_t epoch) const;
  std::vector<Matrix> gather(std::span<const std::size_t> indices) const;
  void close_epoch(std::size_t epoch);

  const MultiViewDataset* dataset_;
  Checkpoint state_;
  std::vector<std::size_t> train_;
  std::vector<std::size_t> val_;
  std::size_t steps_per_epoch_ = 0;
  std::size_t cached_epoch_ = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cached_order_;
  EpochCallback callback_;
};

struct TrainResult {
  Checkpoint final;
  Checkpoint best_val;  // snapshot at the epoch with the lowest validation total
  std::size_t best_epoch = 0;
};

TrainResult train(const MultiViewDataset& dataset, const ModelConfig& config);

/// Input features of the dataset restricted to `indices`, one matrix per view.
std::vector<Matrix> gather_features(const MultiViewDataset& dataset, std::span<const std::size_t> indices);

}  // namespace mvd
