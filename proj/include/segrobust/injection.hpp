#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "segrobust/image.hpp"
#include "segrobust/manifest.hpp"

namespace segrobust {

struct BoundingBox {
  Index x0 = 0;
  Index y0 = 0;
  Index width = 0;
  Index height = 0;
  auto operator<=>(const BoundingBox&) const = default;
};

/// A single object silhouette: the class it paints, a tight bounding box in
/// source coordinates, and a 0/1 bitmap of bbox size with at least one set
/// pixel touching every bbox edge.
struct ObjectMask {
  std::uint8_t class_id = 0;
  BoundingBox bbox;
  MaskGrid bitmap;  // bbox.height x bbox.width
  std::string source_item = "imported";

  Index pixel_count() const;
  void validate(int n_classes, std::uint8_t ignore_value) const;
};

struct MaskBank {
  std::vector<ObjectMask> entries;
  std::vector<std::set<int>> class_filter;  // class sets used at extraction
};

struct InjectionPolicy {
  int count_min = 1;
  int count_max = 3;
  std::optional<std::uint8_t> relabel_class;
  std::uint64_t master_seed = 0;
  int min_area = 16;  // extraction-side floor, kept here for provenance
};

constexpr int kDefaultMinArea = 16;

/// Collects every 4-connected component of pixels whose class belongs to one
/// of the class sets; the component's majority class becomes the mask's
/// class_id (smallest id wins a tie) and components under min_area pixels are
/// dropped.
MaskBank extract_object_masks(const DatasetManifest& manifest,
                              const std::vector<std::set<int>>& class_sets,
                              int min_area = kDefaultMinArea);

/// Translates a mask by (dx, dy); the shifted bbox must stay inside the
/// canvas.
ObjectMask place_mask(const ObjectMask& mask, Index dx, Index dy, Index canvas_w,
                      Index canvas_h);

/// Label mixing: the object overwrites the base wherever its bitmap is set
/// (ignore pixels included); everything else is untouched.
LabelMap mix_labels(const LabelMap& base, const ObjectMask& obj);

/// Paints 1 into `ood` wherever the object covers, mirroring mix_labels.
void mark_coverage(MaskGrid& ood, const ObjectMask& obj);

// --- bank persistence -------------------------------------------------------

/// Bank index JSON plus one 1-bit PNG per entry, written under `dir`.
void save_mask_bank(const MaskBank& bank, const std::filesystem::path& dir);

MaskBank load_mask_bank(const std::filesystem::path& index_path);

/// Deterministic blob / ellipse / polygon silhouettes used as a stand-in
/// outlier shape set.
MaskBank synthetic_silhouette_bank();

}  // namespace segrobust
