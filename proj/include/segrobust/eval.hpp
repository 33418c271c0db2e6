#pragma once

#include "segrobust/manifest.hpp"
#include "segrobust/metrics.hpp"

namespace segrobust {

struct SegEvalResult {
  IouResult iou;
  bool has_calibration = false;
  CalibrationResult calibration;
  std::int64_t item_count = 0;
};

/// Confusion + calibration over every manifest item with a prediction path;
/// calibration runs only when every such item also carries a score map.
/// Items are sharded across workers and the per-item accumulators merged in
/// item order, so results do not depend on the worker count.
SegEvalResult evaluate_segmentation(const DatasetManifest& manifest,
                                    int workers = 0, int ece_bins = 15);

/// Pools pixel anomaly scores (item `scores`, SMAP with n_classes == 1)
/// against the binary OOD masks and computes AUROC / AUPR / FPR95.
CurveResult evaluate_ood(const DatasetManifest& manifest, int workers = 0);

}  // namespace segrobust
