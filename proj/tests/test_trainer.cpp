#include <gtest/gtest.h>

#include "mvd/metrics/disentanglement.hpp"
#include "mvd/model/trainer.hpp"
#include "mvd/simulator/synthetic.hpp"

using namespace mvd;

namespace {

MultiViewDataset toy_dataset(std::size_t items, std::uint64_t seed) {
  SyntheticConfig c = SyntheticConfig::defaults();
  c.items = items;
  c.seed = seed;
  c.views[0].input_dim = 16;
  c.views[1].input_dim = 12;
  c.views[2].input_dim = 8;
  return generate_synthetic(c);
}

}  // namespace

TEST(Trainer, ZeroLearningRateLeavesParams) {
  const auto ds = toy_dataset(150, 1);
  auto cfg = ModelConfig::defaults_for(ds.views);
  cfg.learning_rate = 0.0;
  cfg.epochs = 1;
  Trainer t(ds, cfg);
  const ModelParams before = t.checkpoint().params;
  t.run();
  EXPECT_EQ(t.checkpoint().params, before);
  EXPECT_EQ(t.checkpoint().optimizer.step, t.steps_per_epoch());
}

TEST(Trainer, SameSeedIsBitIdentical) {
  const auto ds = toy_dataset(200, 2);
  auto cfg = ModelConfig::defaults_for(ds.views);
  cfg.epochs = 3;
  cfg.seed = 5;
  const auto a = train(ds, cfg);
  const auto b = train(ds, cfg);
  EXPECT_EQ(a.final, b.final);
  EXPECT_EQ(a.best_val, b.best_val);
  ASSERT_EQ(a.final.history.size(), 6u);  // train and val per epoch
  cfg.seed = 6;
  EXPECT_NE(train(ds, cfg).final.params, a.final.params);
}

TEST(Trainer, HistoryAndBestValidation) {
  const auto ds = toy_dataset(200, 3);
  auto cfg = ModelConfig::defaults_for(ds.views);
  cfg.epochs = 4;
  cfg.learning_rate = 1e-3;
  const auto r = train(ds, cfg);
  double best = 1e300;
  std::size_t best_epoch = 0;
  for (const auto& rec : r.final.history) {
    EXPECT_TRUE(std::isfinite(rec.loss.total));
    if (rec.split == Split::Val && rec.loss.total < best) {
      best = rec.loss.total;
      best_epoch = rec.epoch;
    }
  }
  EXPECT_EQ(r.best_epoch, best_epoch);
  // The snapshot's history ends at the best epoch.
  EXPECT_EQ(r.best_val.history.back().epoch, best_epoch);
  EXPECT_LT(r.final.history.back().loss.total, r.final.history.front().loss.total);
}

TEST(Trainer, EmptyTrainSplitThrows) {
  auto ds = toy_dataset(50, 4);
  for (auto& s : ds.splits) s = Split::Test;
  EXPECT_THROW(Trainer(ds, ModelConfig::defaults_for(ds.views)), std::invalid_argument);
}

TEST(Trainer, ConfigMustMatchDataset) {
  const auto ds = toy_dataset(50, 4);
  auto cfg = ModelConfig::defaults_for(ds.views);
  cfg.views[1].input_dim = 99;
  EXPECT_THROW(Trainer(ds, cfg), std::invalid_argument);
}

// Without orthogonalization the specific outputs keep the input similarity structure.
TEST(Trainer, NoOrthogonalizationPreservesIntraViewStructure) {
  const auto ds = toy_dataset(200, 5);
  auto cfg = ModelConfig::defaults_for(ds.views);
  cfg.loss_weights.lambda2 = 0.0;
  cfg.epochs = 400;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 32;
  const auto r = train(ds, cfg);
  const auto rows = ds.indices(Split::Val);
  const auto x = gather_features(ds, rows);
  const auto e = embed(r.final.config, r.final.params, x);
  const auto report = disentanglement_report(x, e.z_specific);
  for (const auto& p : report.intra) EXPECT_GE(p.pearson, 0.95) << "view " << p.view_a;
}
