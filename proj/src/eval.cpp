#include "segrobust/eval.hpp"

#include <optional>

#include "segrobust/parallel.hpp"
#include "segrobust/png_io.hpp"
#include "segrobust/score_map.hpp"

namespace segrobust {

SegEvalResult evaluate_segmentation(const DatasetManifest& manifest,
                                    int workers, int ece_bins) {
  std::vector<const ManifestItem*> scored;
  for (const auto& item : manifest.items)
    if (item.prediction) scored.push_back(&item);
  if (scored.empty())
    throw std::runtime_error("no manifest item carries a prediction path");
  bool with_calibration = true;
  for (const auto* item : scored)
    if (!item->scores) with_calibration = false;

  std::vector<ConfusionMatrix> cms(scored.size(),
                                   ConfusionMatrix(manifest.n_classes));
  std::vector<CalibrationAccumulator> cals(scored.size(),
                                           CalibrationAccumulator(ece_bins));
  parallel_for(scored.size(), workers, [&](std::size_t i) {
    const ManifestItem& item = *scored[i];
    const LabelMap gt = load_label_map(item.label, manifest);
    const LabelMap pred = load_label_map(*item.prediction, manifest);
    update_confusion(cms[i], gt, pred);
    if (with_calibration)
      calibration_update(cals[i], read_score_map(*item.scores), gt);
  });

  ConfusionMatrix cm(manifest.n_classes);
  CalibrationAccumulator cal(ece_bins);
  for (std::size_t i = 0; i < scored.size(); ++i) {
    cm.merge(cms[i]);
    if (with_calibration) cal.merge(cals[i]);
  }

  SegEvalResult result;
  result.iou = miou(cm);
  result.item_count = static_cast<std::int64_t>(scored.size());
  if (with_calibration) {
    result.has_calibration = true;
    result.calibration = finalize_calibration(cal);
  }
  return result;
}

CurveResult evaluate_ood(const DatasetManifest& manifest, int workers) {
  std::vector<const ManifestItem*> items;
  for (const auto& item : manifest.items)
    if (item.scores && item.ood_mask) items.push_back(&item);
  if (items.empty())
    throw std::runtime_error(
        "no manifest item carries both an anomaly-score map and an OOD mask");

  std::vector<BinaryScoreSet> partials(items.size());
  parallel_for(items.size(), workers, [&](std::size_t i) {
    const ManifestItem& item = *items[i];
    const ScoreMap scores = read_score_map(item.scores.value());
    if (scores.n_classes != 1)
      throw std::runtime_error("anomaly score map must have n_classes == 1: " +
                               item.scores->string());
    const MaskGrid mask = read_png_mask(item.ood_mask.value());
    if (mask.rows() != scores.height || mask.cols() != scores.width)
      throw std::runtime_error("OOD mask and score map sizes differ for '" +
                               item.id + "'");
    for (Index y = 0; y < scores.height; ++y)
      for (Index x = 0; x < scores.width; ++x)
        partials[i].add(scores.pixel(y, x)[0], mask(y, x) != 0);
  });

  BinaryScoreSet pooled;
  for (const auto& p : partials) {
    pooled.scores.insert(pooled.scores.end(), p.scores.begin(), p.scores.end());
    pooled.labels.insert(pooled.labels.end(), p.labels.begin(), p.labels.end());
  }
  return binary_curves(pooled);
}

}  // namespace segrobust
