#include "mvd/dataio/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mvd/dataio/errors.hpp"
#include "mvd/dataio/feature_file.hpp"

namespace mvd {

using nlohmann::json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw IoError(IoError::Kind::Schema, "unknown split tag: " + std::string(s));
}

std::vector<std::size_t> MultiViewDataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) out.push_back(i);
  return out;
}

std::optional<std::size_t> MultiViewDataset::index_of(std::string_view id) const {
  if (id_index_.size() == item_ids.size()) {
    auto it = id_index_.find(std::string(id));
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
  }
  auto it = std::find(item_ids.begin(), item_ids.end(), id);
  if (it == item_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - item_ids.begin());
}

void MultiViewDataset::reindex() {
  id_index_.clear();
  for (std::size_t i = 0; i < item_ids.size(); ++i) id_index_.emplace(item_ids[i], i);
}

std::size_t MultiViewDataset::view_index(std::string_view name) const {
  for (std::size_t m = 0; m < views.size(); ++m)
    if (views[m].name == name) return m;
  throw std::invalid_argument("unknown view: " + std::string(name));
}

std::vector<std::string> MultiViewDataset::classes(const std::string& attribute) const {
  std::set<std::string> s;
  for (const auto& l : labels)
    if (auto it = l.find(attribute); it != l.end()) s.insert(it->second);
  return {s.begin(), s.end()};
}

std::vector<std::string> MultiViewDataset::attributes() const {
  std::set<std::string> s;
  for (const auto& l : labels)
    for (const auto& [k, v] : l) s.insert(k);
  return {s.begin(), s.end()};
}

void MultiViewDataset::validate() const {
  if (features.size() != views.size()) throw std::invalid_argument("dataset: one feature matrix per view required");
  std::set<std::string> names;
  for (std::size_t m = 0; m < views.size(); ++m) {
    if (views[m].input_dim < 1) throw std::invalid_argument("dataset: view input_dim must be >= 1");
    if (!names.insert(views[m].name).second) throw std::invalid_argument("dataset: duplicate view name " + views[m].name);
    if (features[m].rows() != item_ids.size()) throw std::invalid_argument("dataset: feature rows != item count");
    if (features[m].cols() != views[m].input_dim) throw std::invalid_argument("dataset: feature cols != input_dim");
  }
  if (labels.size() != item_ids.size() || splits.size() != item_ids.size()) {
    throw std::invalid_argument("dataset: labels/splits must cover every item");
  }
}

void ingest(MultiViewDataset& ds) {
  ds.validate();
  std::set<std::size_t> degenerate;
  for (auto& f : ds.features) {
    auto n = row_normalize(f);
    degenerate.insert(n.degenerate_rows.begin(), n.degenerate_rows.end());
    f = std::move(n.values);
  }
  ds.degenerate_ids.clear();
  for (std::size_t r : degenerate) ds.degenerate_ids.push_back(ds.item_ids[r]);
  ds.reindex();
}

std::vector<Split> assign_splits(std::size_t n, std::uint64_t seed, std::array<double, 3> ratio) {
  const double total = ratio[0] + ratio[1] + ratio[2];
  if (!(total > 0.0) || ratio[0] < 0 || ratio[1] < 0 || ratio[2] < 0) {
    throw std::invalid_argument("assign_splits: ratio must be non-negative with positive sum");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio[0] / total));
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio[1] / total));
  std::vector<Split> out(n, Split::Test);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train) out[perm[i]] = Split::Train;
    else if (i < n_train + n_val) out[perm[i]] = Split::Val;
  }
  return out;
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(std::filesystem::exists(path) ? IoError::Kind::Io : IoError::Kind::NotFound,
                         "cannot open manifest " + path.string());
  std::vector<ManifestRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      ManifestRecord r;
      r.id = j.at("id").get<std::string>();
      const auto row = j.at("row").get<long long>();
      if (row < 0) throw IoError(IoError::Kind::Schema, "negative row");
      r.row = static_cast<std::size_t>(row);
      if (j.contains("labels")) r.labels = j.at("labels").get<Labels>();
      r.split = parse_split(j.at("split").get<std::string>());
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw IoError(IoError::Kind::Schema, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_manifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::Io, "cannot write manifest " + path.string());
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["row"] = r.row;
    j["labels"] = r.labels;
    j["split"] = std::string(to_string(r.split));
    out << j.dump() << '\n';
  }
}

MultiViewDataset load_dataset(const std::filesystem::path& dir) {
  const auto views_path = dir / "views.json";
  std::ifstream in(views_path);
  if (!in) throw IoError(IoError::Kind::NotFound, "missing " + views_path.string());
  MultiViewDataset ds;
  try {
    const json meta = json::parse(in);
    for (const auto& v : meta.at("views")) {
      ViewSpec spec;
      spec.name = v.at("name").get<std::string>();
      spec.input_dim = v.at("input_dim").get<std::size_t>();
      spec.sim_kind_input = parse_similarity_kind(v.value("sim_kind_input", std::string("dot")));
      spec.sim_kind_output = parse_similarity_kind(v.value("sim_kind_output", std::string("dot")));
      ds.views.push_back(spec);
    }
    if (meta.contains("attribute_views")) {
      ds.attribute_views = meta.at("attribute_views").get<std::map<std::string, std::string>>();
    }
  } catch (const json::exception& e) {
    throw IoError(IoError::Kind::Schema, views_path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(IoError::Kind::Schema, views_path.string() + ": " + e.what());
  }

  std::size_t rows = 0;
  for (std::size_t m = 0; m < ds.views.size(); ++m) {
    auto f = read_view_features(dir / (ds.views[m].name + ".mvdf"));
    if (f.values.cols() != ds.views[m].input_dim) {
      throw IoError(IoError::Kind::Schema, "view " + ds.views[m].name + ": file cols != input_dim");
    }
    if (m == 0) rows = f.values.rows();
    else if (f.values.rows() != rows) throw IoError(IoError::Kind::Schema, "views disagree on row count");
    ds.features.push_back(std::move(f.values));
  }

  auto records = read_manifest(dir / "manifest.jsonl");
  if (records.size() != rows) {
    throw IoError(IoError::Kind::Schema, "manifest has " + std::to_string(records.size()) + " records for " +
                                             std::to_string(rows) + " feature rows");
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.row < b.row; });
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].row != i) throw IoError(IoError::Kind::Schema, "manifest rows must cover 0..n-1 exactly once");
    if (!seen.insert(records[i].id).second) throw IoError(IoError::Kind::Schema, "duplicate item id " + records[i].id);
    ds.item_ids.push_back(records[i].id);
    ds.labels.push_back(std::move(records[i].labels));
    ds.splits.push_back(records[i].split);
  }
  ingest(ds);
  return ds;
}

void save_dataset(const MultiViewDataset& ds, const std::filesystem::path& dir) {
  ds.validate();
  std::filesystem::create_directories(dir);
  json meta;
  meta["views"] = json::array();
  for (const auto& v : ds.views) {
    meta["views"].push_back({{"name", v.name},
                             {"input_dim", v.input_dim},
                             {"sim_kind_input", std::string(to_string(v.sim_kind_input))},
                             {"sim_kind_output", std::string(to_string(v.sim_kind_output))}});
  }
  if (!ds.attribute_views.empty()) meta["attribute_views"] = ds.attribute_views;
  {
    std::ofstream out(dir / "views.json", std::ios::trunc);
    if (!out) throw IoError(IoError::Kind::Io, "cannot write views.json");
    out << meta.dump(2) << '\n';
  }
  for (std::size_t m = 0; m < ds.views.size(); ++m) {
    write_view_features(ds.features[m], dir / (ds.views[m].name + ".mvdf"));
  }
  std::vector<ManifestRecord> records;
  records.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) records.push_back({ds.item_ids[i], i, ds.labels[i], ds.splits[i]});
  write_manifest(records, dir / "manifest.jsonl");
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(std::filesystem::exists(path) ? IoError::Kind::Io : IoError::Kind::NotFound,
                         "cannot open id list " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    ids.push_back(line.substr(b, e - b + 1));
  }
  return ids;
}

}  // namespace mvd
