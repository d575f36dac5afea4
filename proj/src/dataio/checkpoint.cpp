#include "mvd/dataio/checkpoint.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>

#include <json.hpp>

#include "mvd/dataio/bytes.hpp"
#include "mvd/dataio/errors.hpp"

namespace mvd {

using nlohmann::json;

namespace {

constexpr std::uint8_t kMagic[4] = {'M', 'V', 'D', 'C'};
constexpr std::size_t kPreambleSize = 4 + 1 + 8;

std::uint64_t fnv1a(const std::uint8_t* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json loss_to_json(const LossBreakdown& l) {
  return {{"ali", l.ali}, {"spc", l.spc}, {"inf", l.inf}, {"rec", l.rec}, {"total", l.total}};
}

LossBreakdown loss_from_json(const json& j) {
  return {j.at("ali").get<double>(), j.at("spc").get<double>(), j.at("inf").get<double>(),
          j.at("rec").get<double>(), j.at("total").get<double>()};
}

json config_to_json(const ModelConfig& c) {
  json views = json::array();
  for (const auto& v : c.views) {
    views.push_back({{"name", v.name},
                     {"input_dim", v.input_dim},
                     {"sim_kind_input", std::string(to_string(v.sim_kind_input))},
                     {"sim_kind_output", std::string(to_string(v.sim_kind_output))}});
  }
  return {{"views", views},
          {"specific_hidden", c.specific_hidden},
          {"recon_hidden", c.recon_hidden},
          {"aligned_dim", c.aligned_dim},
          {"shared_dim", c.shared_dim},
          {"aligned_hidden", c.aligned_hidden},
          {"loss_weights",
           {{"lambda1", c.loss_weights.lambda1},
            {"lambda2", c.loss_weights.lambda2},
            {"lambda3", c.loss_weights.lambda3},
            {"lambda4", c.loss_weights.lambda4}}},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  for (const auto& v : j.at("views")) {
    c.views.push_back({v.at("name").get<std::string>(), v.at("input_dim").get<std::size_t>(),
                       parse_similarity_kind(v.at("sim_kind_input").get<std::string>()),
                       parse_similarity_kind(v.at("sim_kind_output").get<std::string>())});
  }
  c.specific_hidden = j.at("specific_hidden").get<std::vector<std::size_t>>();
  c.recon_hidden = j.at("recon_hidden").get<std::vector<std::size_t>>();
  c.aligned_dim = j.at("aligned_dim").get<std::size_t>();
  c.shared_dim = j.at("shared_dim").get<std::size_t>();
  c.aligned_hidden = j.at("aligned_hidden").get<std::size_t>();
  const auto& w = j.at("loss_weights");
  c.loss_weights = {w.at("lambda1").get<double>(), w.at("lambda2").get<double>(), w.at("lambda3").get<double>(),
                    w.at("lambda4").get<double>()};
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

struct NamedTensors {
  std::vector<std::string> names;
  std::vector<std::span<const double>> views;
};

NamedTensors all_tensors(const Checkpoint& c) {
  NamedTensors out;
  const auto base = c.params.tensor_names(c.config);
  auto append = [&](const std::string& prefix, const ModelParams& p) {
    auto t = p.tensors();
    for (std::size_t i = 0; i < t.size(); ++i) {
      out.names.push_back(prefix + base[i]);
      out.views.push_back(t[i]);
    }
  };
  append("", c.params);
  append("adam.m.", c.optimizer.first_moment);
  append("adam.v.", c.optimizer.second_moment);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  const NamedTensors tensors = all_tensors(c);
  std::vector<std::uint8_t> block;
  json directory = json::array();
  for (std::size_t i = 0; i < tensors.views.size(); ++i) {
    directory.push_back({{"name", tensors.names[i]}, {"count", tensors.views[i].size()}, {"offset", block.size()}});
    for (double d : tensors.views[i]) bytes::put_f64(block, d);
  }
  json history = json::array();
  for (const auto& r : c.history) {
    history.push_back({{"epoch", r.epoch}, {"split", std::string(to_string(r.split))}, {"loss", loss_to_json(r.loss)}});
  }
  const json header = {
      {"config", config_to_json(c.config)},
      {"adam_step", c.optimizer.step},
      {"history", history},
      {"partial_epoch", {{"items", c.partial_epoch.items}, {"weighted_sum", loss_to_json(c.partial_epoch.weighted_sum)}}},
      {"rng_seed", c.rng_seed},
      {"tensors", directory},
      {"tensor_bytes", block.size()},
      {"tensor_checksum", hex64(fnv1a(block.data(), block.size()))},
  };
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kCheckpointVersion);
  bytes::put_uint(out, static_cast<std::uint64_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), block.begin(), block.end());
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& data) {
  if (data.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), data.begin())) {
    throw IoError(IoError::Kind::BadMagic, "not a checkpoint file (bad magic)");
  }
  if (data.size() < kPreambleSize) throw IoError(IoError::Kind::Truncated, "checkpoint preamble truncated");
  if (data[4] != kCheckpointVersion) {
    throw IoError(IoError::Kind::VersionMismatch, "unsupported checkpoint version " + std::to_string(data[4]));
  }
  const std::uint64_t header_len = bytes::get_uint<std::uint64_t>(data.data() + 5);
  if (header_len > data.size() - kPreambleSize) throw IoError(IoError::Kind::Truncated, "checkpoint header truncated");
  const std::size_t block_start = kPreambleSize + static_cast<std::size_t>(header_len);

  Checkpoint c;
  json header;
  try {
    header = json::parse(data.begin() + kPreambleSize, data.begin() + static_cast<std::ptrdiff_t>(block_start));
    c.config = config_from_json(header.at("config"));
    c.config.validate();
    c.optimizer.step = header.at("adam_step").get<std::uint64_t>();
    for (const auto& r : header.at("history")) {
      c.history.push_back({r.at("epoch").get<std::size_t>(), parse_split(r.at("split").get<std::string>()),
                           loss_from_json(r.at("loss"))});
    }
    const auto& pe = header.at("partial_epoch");
    c.partial_epoch.items = pe.at("items").get<std::size_t>();
    c.partial_epoch.weighted_sum = loss_from_json(pe.at("weighted_sum"));
    c.rng_seed = header.at("rng_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw IoError(IoError::Kind::Corrupt, std::string("checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(IoError::Kind::Corrupt, std::string("checkpoint header: ") + e.what());
  }

  const std::size_t block_size = data.size() - block_start;
  if (block_size < header.at("tensor_bytes").get<std::size_t>()) {
    throw IoError(IoError::Kind::Truncated, "checkpoint tensor block truncated");
  }
  if (block_size != header.at("tensor_bytes").get<std::size_t>()) {
    throw IoError(IoError::Kind::Corrupt, "trailing bytes after checkpoint tensors");
  }
  const std::uint8_t* block = data.data() + block_start;
  if (hex64(fnv1a(block, block_size)) != header.at("tensor_checksum").get<std::string>()) {
    throw IoError(IoError::Kind::Corrupt, "checkpoint tensor checksum mismatch");
  }

  c.params = ModelParams::zeros(c.config);
  c.optimizer.first_moment = ModelParams::zeros(c.config);
  c.optimizer.second_moment = ModelParams::zeros(c.config);
  std::vector<std::span<double>> targets;
  for (ModelParams* p : {&c.params, &c.optimizer.first_moment, &c.optimizer.second_moment}) {
    for (auto t : p->tensors()) targets.push_back(t);
  }
  const auto& dir = header.at("tensors");
  if (dir.size() != targets.size()) throw IoError(IoError::Kind::Corrupt, "checkpoint tensor directory size mismatch");
  const auto expected_names = all_tensors(c).names;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& entry = dir[i];
    const auto count = entry.at("count").get<std::size_t>();
    const auto offset = entry.at("offset").get<std::size_t>();
    if (entry.at("name").get<std::string>() != expected_names[i] || count != targets[i].size()) {
      throw IoError(IoError::Kind::Corrupt, "checkpoint tensor " + expected_names[i] + " does not match config");
    }
    if (offset > block_size || count > (block_size - offset) / 8) {
      throw IoError(IoError::Kind::Corrupt, "checkpoint tensor offset out of range");
    }
    for (std::size_t k = 0; k < count; ++k) targets[i][k] = bytes::get_f64(block + offset + 8 * k);
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  bytes::write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(bytes::read_file(path)); }

}  // namespace mvd
