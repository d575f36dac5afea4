#pragma once

// Checkpoint file:
//   "MVDC" | version u8 | header length u64 LE | JSON header | tensors as f64 LE
// The header carries the model config, training history and a tensor
// directory (name, shape, byte offset relative to the tensor block).

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mvd/model/adam.hpp"
#include "mvd/model/config.hpp"
#include "mvd/model/losses.hpp"
#include "mvd/model/params.hpp"

namespace mvd {

inline constexpr std::uint8_t kCheckpointVersion = 0x01;

struct EpochRecord {
  std::size_t epoch = 0;
  Split split = Split::Train;
  LossBreakdown loss;

  bool operator==(const EpochRecord&) const = default;
};

/// Running sums for the epoch in progress, so a mid-epoch resume reproduces history.
struct EpochAccumulator {
  LossBreakdown weighted_sum;
  std::size_t items = 0;

  bool operator==(const EpochAccumulator&) const = default;
};

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  AdamState optimizer;
  std::vector<EpochRecord> history;
  EpochAccumulator partial_epoch;
  std::uint64_t rng_seed = 0;

  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mvd
