#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segrobust/image.hpp"

namespace segrobust {

struct ManifestItem {
  std::string id;
  std::filesystem::path label;  // resolved against the manifest directory
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> prediction;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> ood_mask;
};

/// Self-describing dataset index. Paths are stored resolved; missing files
/// are detected lazily when an item is actually loaded.
struct DatasetManifest {
  int n_classes = 0;
  std::uint8_t ignore_value = kDefaultIgnoreValue;
  std::vector<ManifestItem> items;
  std::vector<std::string> class_names;  // empty when absent
  std::filesystem::path directory;       // where the manifest file lives

  const ManifestItem& item(const std::string& id) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes the manifest JSON; paths are emitted relative to `path`'s directory
/// when possible, absolute otherwise.
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

/// Loads one label map and validates it against the manifest's n_classes and
/// ignore_value. Errors name the file and the first offending coordinate.
LabelMap load_label_map(const std::filesystem::path& path,
                        const DatasetManifest& manifest);

void save_label_map(const LabelMap& map, const std::filesystem::path& path);

struct Provenance {
  std::uint64_t master_seed = 0;
  std::string tool_version;
  std::string config_digest;
  std::int64_t item_count = 0;
};

/// Scalar metric bundle emitted by the eval commands. Keys are restricted to
/// the documented metric names (see is_known_metric_key).
struct EvalReport {
  std::map<std::string, double> metrics;
  Provenance provenance;

  void set(const std::string& key, double value);
  std::string to_json() const;
};

bool is_known_metric_key(const std::string& key);

}  // namespace segrobust
