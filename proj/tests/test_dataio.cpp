#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "mvd/dataio/checkpoint.hpp"
#include "mvd/dataio/dataset.hpp"
#include "mvd/dataio/errors.hpp"
#include "mvd/dataio/feature_file.hpp"
#include "mvd/model/trainer.hpp"
#include "mvd/simulator/synthetic.hpp"

using namespace mvd;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mvd_test_dataio_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::uint8_t> header(std::uint32_t rows, std::uint32_t cols) {
  std::vector<std::uint8_t> b = {'M', 'V', 'D', 'F', 0x01};
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(rows >> (8 * i)));
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(cols >> (8 * i)));
  return b;
}

void push_f32(std::vector<std::uint8_t>& b, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

IoError::Kind decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_view_features(bytes);
  } catch (const IoError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an IoError";
  return IoError::Kind::Io;
}

SyntheticConfig small_synthetic(std::size_t items, std::uint64_t seed) {
  SyntheticConfig c = SyntheticConfig::defaults();
  c.items = items;
  c.seed = seed;
  c.views[0].input_dim = 12;
  c.views[1].input_dim = 10;
  c.views[2].input_dim = 8;
  return c;
}

}  // namespace

TEST(FeatureFile, DecodesHandWrittenFile) {
  auto b = header(2, 3);
  for (float f : {1.f, 2.f, 3.f, 4.f, 5.f, 6.f}) push_f32(b, f);
  const FeatureFile f = decode_view_features(b);
  EXPECT_EQ(f.values, (Matrix{{1, 2, 3}, {4, 5, 6}}));
  EXPECT_EQ(f.header.rows, 2u);
  EXPECT_EQ(f.header.cols, 3u);
}

TEST(FeatureFile, ErrorKinds) {
  auto b = header(2, 3);
  for (int i = 0; i < 5; ++i) push_f32(b, 1.f);
  EXPECT_EQ(decode_error(b), IoError::Kind::Truncated);

  auto magic = header(1, 1);
  push_f32(magic, 1.f);
  magic[0] = 'X';
  EXPECT_EQ(decode_error(magic), IoError::Kind::BadMagic);

  auto version = header(1, 1);
  push_f32(version, 1.f);
  version[4] = 0x02;
  EXPECT_EQ(decode_error(version), IoError::Kind::VersionMismatch);

  EXPECT_EQ(decode_error(header(0xFFFFFFFFu, 0xFFFFFFFFu)), IoError::Kind::DimOverflow);
  EXPECT_EQ(decode_error({'M', 'V', 'D'}), IoError::Kind::Truncated);

  auto nan = header(1, 1);
  push_f32(nan, std::nanf(""));
  EXPECT_EQ(decode_error(nan), IoError::Kind::Corrupt);
}

TEST(FeatureFile, EmptyMatrixIsValid) {
  const auto bytes = encode_view_features(Matrix(0, 7));
  EXPECT_EQ(bytes, header(0, 7));
  const auto f = decode_view_features(bytes);
  EXPECT_EQ(f.values.rows(), 0u);
  EXPECT_EQ(f.values.cols(), 7u);
}

TEST(FeatureFile, SingleValueEncoding) {
  auto expected = header(1, 1);
  push_f32(expected, 2.5f);
  EXPECT_EQ(encode_view_features(Matrix{{2.5}}), expected);
  // 2.5f = 0x40200000 little endian
  EXPECT_EQ(expected[13], 0x00);
  EXPECT_EQ(expected[15], 0x20);
  EXPECT_EQ(expected[16], 0x40);
}

TEST(FeatureFile, RoundTripIsExactAtFloatPrecision) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  Matrix m(17, 9);
  for (double& v : m.flat()) v = static_cast<float>(n(rng));
  const fs::path p = temp_dir("rt") / "x.mvdf";
  write_view_features(m, p);
  EXPECT_EQ(read_view_features(p).values, m);

  // Doubles are rounded to the nearest float on write.
  Matrix d{{0.1, 1.0 / 3.0}};
  const Matrix back = decode_view_features(encode_view_features(d)).values;
  EXPECT_EQ(back(0, 0), static_cast<double>(0.1f));
  EXPECT_EQ(back(0, 1), static_cast<double>(1.0f / 3.0f));
}

TEST(FeatureFile, MissingFileIsNotFound) {
  try {
    read_view_features("/nonexistent/dir/x.mvdf");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.kind(), IoError::Kind::NotFound);
  }
}

TEST(Dataset, IngestNormalizesAndFlagsDegenerateRows) {
  MultiViewDataset ds;
  ds.views = {{"a", 2}, {"b", 1}};
  ds.features = {Matrix{{3, 4}, {0, 0}}, Matrix{{2}, {5}}};
  ds.item_ids = {"i0", "i1"};
  ds.labels = {{}, {}};
  ds.splits = {Split::Train, Split::Test};
  ds.reindex();
  ingest(ds);
  EXPECT_DOUBLE_EQ(ds.features[0](0, 0), 0.6);
  EXPECT_DOUBLE_EQ(ds.features[1](1, 0), 1.0);
  EXPECT_EQ(ds.degenerate_ids, std::vector<std::string>{"i1"});
}

TEST(Dataset, SaveLoadRoundTrip) {
  const auto ds = generate_synthetic(small_synthetic(120, 4));
  const fs::path dir = temp_dir("ds");
  save_dataset(ds, dir);
  const auto back = load_dataset(dir);
  EXPECT_EQ(back.views, ds.views);
  EXPECT_EQ(back.item_ids, ds.item_ids);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.splits, ds.splits);
  EXPECT_EQ(back.attribute_views, ds.attribute_views);
  for (std::size_t m = 0; m < ds.view_count(); ++m) {
    ASSERT_EQ(back.features[m].rows(), ds.features[m].rows());
    for (std::size_t i = 0; i < ds.features[m].size(); ++i) {
      // stored as f32 then re-normalized
      EXPECT_NEAR(back.features[m].flat()[i], ds.features[m].flat()[i], 1e-6);
    }
  }
  EXPECT_EQ(*back.index_of(ds.item_ids[7]), 7u);
}

TEST(Dataset, ManifestSchemaErrors) {
  const fs::path dir = temp_dir("manifest");
  {
    std::ofstream(dir / "m.jsonl") << "{\"id\": \"a\", \"row\": 0, \"split\": \"holdout\"}\n";
  }
  try {
    read_manifest(dir / "m.jsonl");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.kind(), IoError::Kind::Schema);
  }
  {
    std::ofstream(dir / "m.jsonl") << "not json\n";
  }
  EXPECT_THROW(read_manifest(dir / "m.jsonl"), IoError);
}

TEST(Dataset, IdListSkipsCommentsAndBlanks) {
  const fs::path p = temp_dir("ids") / "c.txt";
  std::ofstream(p) << "# members\nitem_1\n\n  item_2  \n# done\n";
  EXPECT_EQ(read_id_list(p), (std::vector<std::string>{"item_1", "item_2"}));
}

TEST(Dataset, SplitRatios) {
  const auto s = assign_splits(1000, 9);
  std::size_t counts[3] = {};
  for (Split x : s) ++counts[static_cast<int>(x)];
  EXPECT_EQ(counts[0], 600u);
  EXPECT_EQ(counts[1], 300u);
  EXPECT_EQ(counts[2], 100u);
  EXPECT_EQ(assign_splits(1000, 9), s);
}

TEST(Checkpoint, FreshRoundTripIsBitwise) {
  const auto ds = generate_synthetic(small_synthetic(60, 1));
  const auto cfg = ModelConfig::defaults_for(ds.views);
  Checkpoint c{cfg, init_params(cfg, 5), AdamState::zeros_like(cfg), {}, {}, 5};
  const auto bytes = encode_checkpoint(c);
  EXPECT_EQ(decode_checkpoint(bytes), c);
  EXPECT_EQ(encode_checkpoint(decode_checkpoint(bytes)), bytes);
}

TEST(Checkpoint, TamperedFilesAreRejected) {
  const auto ds = generate_synthetic(small_synthetic(60, 1));
  const auto cfg = ModelConfig::defaults_for(ds.views);
  const auto bytes = encode_checkpoint({cfg, init_params(cfg, 5), AdamState::zeros_like(cfg), {}, {}, 5});
  auto kind_of = [](std::vector<std::uint8_t> b) {
    try {
      decode_checkpoint(b);
    } catch (const IoError& e) {
      return e.kind();
    }
    return IoError::Kind::Io;
  };
  auto magic = bytes;
  magic[1] = 'X';
  EXPECT_EQ(kind_of(magic), IoError::Kind::BadMagic);
  auto version = bytes;
  version[4] = 0x7f;
  EXPECT_EQ(kind_of(version), IoError::Kind::VersionMismatch);
  auto flipped = bytes;
  flipped.back() ^= 0x01;
  EXPECT_EQ(kind_of(flipped), IoError::Kind::Corrupt);
  auto cut = bytes;
  cut.resize(cut.size() - 8);
  EXPECT_EQ(kind_of(cut), IoError::Kind::Truncated);
}

TEST(Checkpoint, ResumeAfterThreeStepsMatchesUninterruptedRun) {
  const auto ds = generate_synthetic(small_synthetic(300, 2));
  auto cfg = ModelConfig::defaults_for(ds.views);
  cfg.epochs = 2;
  cfg.batch_size = 32;
  cfg.seed = 11;

  Trainer full(ds, cfg);
  full.run();

  Trainer first(ds, cfg);
  for (int i = 0; i < 3; ++i) first.step();
  const fs::path p = temp_dir("resume") / "ckpt.mvdc";
  save_checkpoint(first.checkpoint(), p);
  Trainer second(ds, load_checkpoint(p));
  EXPECT_EQ(second.steps_done(), 3u);
  second.run();

  EXPECT_EQ(second.checkpoint().params, full.checkpoint().params);
  EXPECT_EQ(second.checkpoint().optimizer, full.checkpoint().optimizer);
  EXPECT_EQ(second.checkpoint().history, full.checkpoint().history);
  EXPECT_EQ(encode_checkpoint(second.checkpoint()), encode_checkpoint(full.checkpoint()));
}
