#pragma once

#include <filesystem>
#include <vector>

#include "segrobust/injection.hpp"
#include "segrobust/manifest.hpp"
#include "segrobust/morphology.hpp"

namespace segrobust {

/// One generated dataset per severity: every label map is replaced by
/// categorical_morph with an SE of that radius, images are passed through
/// untouched, and a manifest is written per severity directory
/// (`<out_dir>/severity_<k>/manifest.json`). Severities must be strictly
/// increasing. Returns the severity manifest paths in order.
std::vector<std::filesystem::path> generate_morphological_variant(
    const DatasetManifest& manifest, SeShape shape,
    const std::vector<int>& severities, MorphOp op,
    const ClassPriorityOrder& order, const std::filesystem::path& out_dir,
    int workers = 0);

/// Corrupted variant: per item, n ~ Uniform[count_min, count_max] bank
/// entries are drawn and mixed in at uniform in-bounds placements, later
/// draws overwriting earlier ones. The RNG stream is derived from
/// (master_seed, item id), so results do not depend on scheduling. Also
/// writes `injections.jsonl` (one record per item) next to the manifest.
std::filesystem::path generate_corrupted_variant(
    const DatasetManifest& manifest, const MaskBank& bank,
    const InjectionPolicy& policy, const std::filesystem::path& out_dir,
    int workers = 0);

/// Outlier variant: like the corrupted one, but every injected object is
/// painted with policy.relabel_class (required) and a 0/1 OOD mask marking
/// injected pixels is written per item and referenced from the manifest.
std::filesystem::path generate_outlier_variant(
    const DatasetManifest& manifest, const MaskBank& shape_bank,
    const InjectionPolicy& policy, const std::filesystem::path& out_dir,
    int workers = 0);

}  // namespace segrobust
