#include "segrobust/generate.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segrobust/fs_util.hpp"
#include "segrobust/parallel.hpp"
#include "segrobust/png_io.hpp"
#include "segrobust/rng.hpp"

namespace segrobust {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_severities(const std::vector<int>& severities) {
  if (severities.empty())
    throw std::invalid_argument("severity list must be nonempty");
  for (std::size_t i = 0; i < severities.size(); ++i) {
    if (severities[i] < 0)
      throw std::invalid_argument("severities must be >= 0");
    if (i > 0 && severities[i] <= severities[i - 1])
      throw std::invalid_argument("severities must be strictly increasing");
  }
}

std::string label_filename(const std::string& item_id) {
  return item_id + "_labels.png";
}

/// One injection applied to an item, recorded for reproducibility.
struct InjectionRecord {
  std::size_t entry = 0;
  Index x0 = 0;
  Index y0 = 0;
};

struct ItemInjections {
  std::string item_id;
  std::vector<InjectionRecord> records;
};

std::string injections_to_jsonl(const std::vector<ItemInjections>& all) {
  std::ostringstream out;
  for (const auto& item : all) {
    json j;
    j["item"] = item.item_id;
    j["injections"] = json::array();
    for (const auto& r : item.records)
      j["injections"].push_back(
          {{"entry", r.entry}, {"x0", r.x0}, {"y0", r.y0}});
    out << j.dump() << "\n";
  }
  return out.str();
}

void check_policy(const InjectionPolicy& policy, const MaskBank& bank,
                  const DatasetManifest& manifest, bool outlier) {
  if (policy.count_min < 0 || policy.count_min > policy.count_max)
    throw std::invalid_argument("invalid injection count range");
  if (policy.count_max > 0 && bank.entries.empty())
    throw std::invalid_argument("mask bank is empty but injections requested");
  if (outlier && !policy.relabel_class)
    throw std::invalid_argument("outlier generation requires a relabel class");
  if (policy.relabel_class) {
    if (*policy.relabel_class == manifest.ignore_value ||
        int(*policy.relabel_class) >= manifest.n_classes)
      throw std::invalid_argument("relabel class is not a valid class id");
  }
}

/// Shared by the corrupted and outlier generators; `outlier` toggles the
/// relabel-and-mask behavior.
fs::path generate_injected(const DatasetManifest& manifest,
                           const MaskBank& bank, const InjectionPolicy& policy,
                           const fs::path& out_dir, bool outlier,
                           int workers) {
  check_policy(policy, bank, manifest, outlier);
  if (!outlier)
    for (const auto& entry : bank.entries)
      entry.validate(manifest.n_classes, manifest.ignore_value);

  StagingDir staging(out_dir);
  DatasetManifest out_manifest;
  out_manifest.n_classes = manifest.n_classes;
  out_manifest.ignore_value = manifest.ignore_value;
  out_manifest.class_names = manifest.class_names;
  out_manifest.items.resize(manifest.items.size());
  std::vector<ItemInjections> records(manifest.items.size());

  parallel_for(manifest.items.size(), workers, [&](std::size_t i) {
    const ManifestItem& item = manifest.items[i];
    LabelMap map = load_label_map(item.label, manifest);
    const Index w = map.width(), h = map.height();
    MaskGrid ood = MaskGrid::Zero(h, w);

    // Only entries whose bbox fits this canvas are eligible for the draw.
    std::vector<std::size_t> fitting;
    for (std::size_t e = 0; e < bank.entries.size(); ++e)
      if (bank.entries[e].bbox.width <= w && bank.entries[e].bbox.height <= h)
        fitting.push_back(e);

    SplitMix64 rng(item_seed(policy.master_seed, item.id));
    const int n_objects =
        static_cast<int>(rng.in(policy.count_min, policy.count_max));
    if (n_objects > 0 && fitting.empty())
      throw std::runtime_error("no bank entry fits item '" + item.id + "' (" +
                               std::to_string(w) + "x" + std::to_string(h) +
                               ")");

    ItemInjections rec;
    rec.item_id = item.id;
    for (int k = 0; k < n_objects; ++k) {
      const std::size_t e = fitting[rng.below(fitting.size())];
      ObjectMask obj = bank.entries[e];
      obj.bbox.x0 = static_cast<Index>(rng.below(w - obj.bbox.width + 1));
      obj.bbox.y0 = static_cast<Index>(rng.below(h - obj.bbox.height + 1));
      if (outlier) obj.class_id = *policy.relabel_class;
      map = mix_labels(map, obj);
      if (outlier) mark_coverage(ood, obj);
      rec.records.push_back({e, obj.bbox.x0, obj.bbox.y0});
    }

    save_label_map(map, staging.path() / label_filename(item.id));

    ManifestItem out_item;
    out_item.id = item.id;
    out_item.label = staging.path() / label_filename(item.id);
    out_item.image = item.image;
    if (outlier) {
      const std::string mask_name = item.id + "_ood.png";
      write_png_mask(staging.path() / mask_name, ood);
      out_item.ood_mask = staging.path() / mask_name;
    }
    out_manifest.items[i] = std::move(out_item);
    records[i] = std::move(rec);
  });

  // Inside-tree paths are emitted relative, so they stay valid after the
  // staging dir is renamed into place.
  save_manifest(out_manifest, staging.path() / "manifest.json");
  write_file_atomic(staging.path() / "injections.jsonl",
                    injections_to_jsonl(records));
  staging.commit();
  return out_dir / "manifest.json";
}

}  // namespace

std::vector<fs::path> generate_morphological_variant(
    const DatasetManifest& manifest, SeShape shape,
    const std::vector<int>& severities, MorphOp op,
    const ClassPriorityOrder& order, const fs::path& out_dir, int workers) {
  check_severities(severities);

  StagingDir staging(out_dir);
  std::vector<fs::path> manifest_paths;
  for (int severity : severities) {
    const StructuringElement se = make_structuring_element(shape, severity);
    const std::string sev_name = "severity_" + std::to_string(severity);
    const fs::path sev_dir = staging.path() / sev_name;
    fs::create_directories(sev_dir);

    DatasetManifest out_manifest;
    out_manifest.n_classes = manifest.n_classes;
    out_manifest.ignore_value = manifest.ignore_value;
    out_manifest.class_names = manifest.class_names;
    out_manifest.directory = sev_dir;
    out_manifest.items.resize(manifest.items.size());

    parallel_for(manifest.items.size(), workers, [&](std::size_t i) {
      const ManifestItem& item = manifest.items[i];
      const LabelMap map = load_label_map(item.label, manifest);
      const LabelMap morphed = categorical_morph(map, se, order, op);
      save_label_map(morphed, sev_dir / label_filename(item.id));

      ManifestItem out_item;
      out_item.id = item.id;
      out_item.label = sev_dir / label_filename(item.id);
      out_item.image = item.image;  // images pass through unchanged
      out_manifest.items[i] = std::move(out_item);
    });

    save_manifest(out_manifest, sev_dir / "manifest.json");
    manifest_paths.push_back(out_dir / sev_name / "manifest.json");
  }
  staging.commit();
  return manifest_paths;
}

fs::path generate_corrupted_variant(const DatasetManifest& manifest,
                                    const MaskBank& bank,
                                    const InjectionPolicy& policy,
                                    const fs::path& out_dir, int workers) {
  return generate_injected(manifest, bank, policy, out_dir, /*outlier=*/false,
                           workers);
}

fs::path generate_outlier_variant(const DatasetManifest& manifest,
                                  const MaskBank& shape_bank,
                                  const InjectionPolicy& policy,
                                  const fs::path& out_dir, int workers) {
  return generate_injected(manifest, shape_bank, policy, out_dir,
                           /*outlier=*/true, workers);
}

}  // namespace segrobust
