#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "segrobust/image.hpp"
#include "segrobust/score_map.hpp"

namespace segrobust {

/// Rows are ground truth, columns are prediction. Merging is elementwise
/// addition, so sharded evaluation is exact.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  explicit ConfusionMatrix(int n_classes)
      : counts(Eigen::Matrix<std::int64_t, Eigen::Dynamic,
                             Eigen::Dynamic>::Zero(n_classes, n_classes)) {}

  int n_classes() const { return static_cast<int>(counts.rows()); }
  void merge(const ConfusionMatrix& other) { counts += other.counts; }
};

/// Tallies one (gt, pred) pair into the matrix; ignore-labeled ground-truth
/// pixels are skipped. A prediction equal to the ignore value at a counted
/// pixel is an error.
void update_confusion(ConfusionMatrix& cm, const LabelMap& gt,
                      const LabelMap& pred);

struct IouResult {
  double miou = 0.0;
  std::vector<double> per_class;  // NaN for classes excluded from the mean
};

/// IoU_c = TP / (TP + FP + FN); classes whose denominator is zero are
/// excluded from the mean. Throws when every class is excluded.
IouResult miou(const ConfusionMatrix& cm);

/// Equal-width confidence bins over (0, 1] plus an NLL sum. Mergeable, so
/// items can be processed in parallel and reduced afterwards.
struct CalibrationAccumulator {
  explicit CalibrationAccumulator(int n_bins = 15);

  int n_bins() const { return static_cast<int>(confidence_sum.size()); }
  void merge(const CalibrationAccumulator& other);

  std::vector<double> confidence_sum;
  std::vector<std::int64_t> correct_count;
  std::vector<std::int64_t> total_count;
  double nll_sum = 0.0;
  std::int64_t pixel_count = 0;
};

constexpr double kNllProbabilityFloor = 1e-12;

/// Bins each non-ignore pixel's top-class confidence, tallies top-1
/// correctness against gt, and accumulates -log p(gt class) with the
/// probability floored at 1e-12.
void calibration_update(CalibrationAccumulator& acc, const ScoreMap& scores,
                        const LabelMap& gt);

struct CalibrationResult {
  double ece = 0.0;
  double nll = 0.0;
};

CalibrationResult finalize_calibration(const CalibrationAccumulator& acc);

/// Scored binary decisions; label 1 marks the positive (OOD) class.
struct BinaryScoreSet {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;

  void add(double score, bool positive) {
    scores.push_back(score);
    labels.push_back(positive ? 1 : 0);
  }
  std::size_t size() const { return scores.size(); }
};

struct CurveResult {
  double auroc = 0.0;
  double aupr = 0.0;
  double fpr95 = 0.0;
};

/// AUROC by trapezoidal area over the ROC traced at every distinct threshold
/// (equivalently the Mann-Whitney statistic with ties worth 0.5), AUPR by the
/// step-wise average-precision rule, and FPR at TPR = 0.95 with linear
/// interpolation between adjacent ROC points. Needs at least one positive and
/// one negative.
CurveResult binary_curves(const BinaryScoreSet& set);

}  // namespace segrobust
