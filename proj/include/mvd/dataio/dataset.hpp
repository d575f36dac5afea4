#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mvd/numerics/matrix.hpp"
#include "mvd/numerics/ops.hpp"

namespace mvd {

struct ViewSpec {
  std::string name;
  std::size_t input_dim = 0;
  SimilarityKind sim_kind_input = SimilarityKind::Dot;
  SimilarityKind sim_kind_output = SimilarityKind::Dot;

  bool operator==(const ViewSpec&) const = default;
};

enum class Split { Train, Val, Test };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

using Labels = std::map<std::string, std::string>;

struct ManifestRecord {
  std::string id;
  std::size_t row = 0;
  Labels labels;
  Split split = Split::Train;
};

/// Per-view feature matrices, row-aligned by item.
struct MultiViewDataset {
  std::vector<ViewSpec> views;
  std::vector<Matrix> features;
  std::vector<std::string> item_ids;
  std::vector<Labels> labels;
  std::vector<Split> splits;
  /// attribute type -> name of the view it is known to correlate with (optional metadata)
  std::map<std::string, std::string> attribute_views;
  /// ids whose row had zero norm in some view at ingestion
  std::vector<std::string> degenerate_ids;

  std::size_t size() const noexcept { return item_ids.size(); }
  std::size_t view_count() const noexcept { return views.size(); }
  std::vector<std::size_t> indices(Split s) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Rebuilds the id lookup table; call after editing item_ids.
  void reindex();
  std::size_t view_index(std::string_view name) const;
  /// Distinct classes of an attribute, sorted.
  std::vector<std::string> classes(const std::string& attribute) const;
  std::vector<std::string> attributes() const;

  /// Throws std::invalid_argument when the shape invariants do not hold.
  void validate() const;

 private:
  std::unordered_map<std::string, std::size_t> id_index_;
};

/// Normalizes every feature row to unit norm and records degenerate ids.
void ingest(MultiViewDataset& ds);

/// Seeded permutation split by ratio (default 6:3:1).
std::vector<Split> assign_splits(std::size_t n, std::uint64_t seed,
                                 std::array<double, 3> ratio = {6.0, 3.0, 1.0});

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path);

/// Directory layout: views.json, one <view>.mvdf per view, manifest.jsonl.
MultiViewDataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const MultiViewDataset& ds, const std::filesystem::path& dir);

/// Reads a collection file: one item id per line, blank lines and '#' comments ignored.
std::vector<std::string> read_id_list(const std::filesystem::path& path);

}  // namespace mvd
