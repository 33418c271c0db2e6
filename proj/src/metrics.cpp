#include "segrobust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace segrobust {

void update_confusion(ConfusionMatrix& cm, const LabelMap& gt,
                      const LabelMap& pred) {
  if (!gt.same_shape(pred))
    throw std::invalid_argument("update_confusion: dimension mismatch");
  const int nc = cm.n_classes();
  for (Index y = 0; y < gt.height(); ++y) {
    for (Index x = 0; x < gt.width(); ++x) {
      const std::uint8_t g = gt.grid(y, x);
      if (g == gt.ignore_value) continue;
      const std::uint8_t p = pred.grid(y, x);
      if (p == pred.ignore_value || int(p) >= nc) {
        std::ostringstream msg;
        msg << "prediction value " << int(p) << " at (" << x << "," << y
            << ") is not a class id";
        throw std::runtime_error(msg.str());
      }
      ++cm.counts(g, p);
    }
  }
}

IouResult miou(const ConfusionMatrix& cm) {
  const int nc = cm.n_classes();
  IouResult result;
  result.per_class.assign(nc, std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int included = 0;
  for (int c = 0; c < nc; ++c) {
    const std::int64_t tp = cm.counts(c, c);
    const std::int64_t fn = cm.counts.row(c).sum() - tp;
    const std::int64_t fp = cm.counts.col(c).sum() - tp;
    const std::int64_t denom = tp + fp + fn;
    if (denom == 0) continue;  // class absent from both gt and prediction
    const double iou = double(tp) / double(denom);
    result.per_class[c] = iou;
    sum += iou;
    ++included;
  }
  if (included == 0) throw std::runtime_error("empty IoU mean");
  result.miou = sum / included;
  return result;
}

CalibrationAccumulator::CalibrationAccumulator(int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  confidence_sum.assign(n_bins, 0.0);
  correct_count.assign(n_bins, 0);
  total_count.assign(n_bins, 0);
}

void CalibrationAccumulator::merge(const CalibrationAccumulator& other) {
  if (n_bins() != other.n_bins())
    throw std::invalid_argument("cannot merge accumulators with different bins");
  for (int b = 0; b < n_bins(); ++b) {
    confidence_sum[b] += other.confidence_sum[b];
    correct_count[b] += other.correct_count[b];
    total_count[b] += other.total_count[b];
  }
  nll_sum += other.nll_sum;
  pixel_count += other.pixel_count;
}

void calibration_update(CalibrationAccumulator& acc, const ScoreMap& scores,
                        const LabelMap& gt) {
  if (scores.height != gt.height() || scores.width != gt.width())
    throw std::invalid_argument("calibration_update: dimension mismatch");
  if (scores.n_classes < 2)
    throw std::invalid_argument(
        "calibration needs class-probability score maps (n_classes >= 2)");
  const int bins = acc.n_bins();
  for (Index y = 0; y < gt.height(); ++y) {
    for (Index x = 0; x < gt.width(); ++x) {
      const std::uint8_t g = gt.grid(y, x);
      if (g == gt.ignore_value) continue;
      if (int(g) >= scores.n_classes)
        throw std::runtime_error("ground-truth class exceeds score channels");
      const float* p = scores.pixel(y, x);
      int top = 0;
      for (int c = 1; c < scores.n_classes; ++c)
        if (p[c] > p[top]) top = c;  // first index wins ties
      const double conf = p[top];
      // Equal-width bins over (0, 1]: bin b covers (b/n, (b+1)/n].
      int b = static_cast<int>(std::ceil(conf * bins)) - 1;
      b = std::clamp(b, 0, bins - 1);
      acc.confidence_sum[b] += conf;
      acc.total_count[b] += 1;
      if (top == int(g)) acc.correct_count[b] += 1;
      const double p_true = std::max(double(p[g]), kNllProbabilityFloor);
      acc.nll_sum += -std::log(p_true);
      acc.pixel_count += 1;
    }
  }
}

CalibrationResult finalize_calibration(const CalibrationAccumulator& acc) {
  if (acc.pixel_count == 0)
    throw std::runtime_error("empty calibration accumulator");
  CalibrationResult r;
  for (int b = 0; b < acc.n_bins(); ++b) {
    if (acc.total_count[b] == 0) continue;
    const double count = double(acc.total_count[b]);
    const double accuracy = double(acc.correct_count[b]) / count;
    const double confidence = acc.confidence_sum[b] / count;
    r.ece += (count / double(acc.pixel_count)) * std::abs(accuracy - confidence);
  }
  r.nll = acc.nll_sum / double(acc.pixel_count);
  return r;
}

namespace {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

}  // namespace

CurveResult binary_curves(const BinaryScoreSet& set) {
  const std::size_t n = set.size();
  if (n == 0) throw std::invalid_argument("binary_curves: empty score set");
  std::int64_t positives = 0;
  for (std::uint8_t l : set.labels) positives += l;
  const std::int64_t negatives = static_cast<std::int64_t>(n) - positives;
  if (positives == 0)
    throw std::invalid_argument("binary_curves: no positive samples");
  if (negatives == 0)
    throw std::invalid_argument("binary_curves: no negative samples");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return set.scores[a] > set.scores[b];
  });

  // Sweep thresholds from high to low, emitting one ROC / PR point per
  // distinct score so tied scores enter as a group.
  std::vector<RocPoint> roc{{0.0, 0.0}};
  std::int64_t tp = 0, fp = 0;
  double auroc = 0.0, aupr = 0.0, prev_recall = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    std::int64_t group_tp = 0, group_fp = 0;
    while (j < n && set.scores[idx[j]] == set.scores[idx[i]]) {
      if (set.labels[idx[j]]) ++group_tp;
      else ++group_fp;
      ++j;
    }
    const double prev_fpr = double(fp) / negatives;
    const double prev_tpr = double(tp) / positives;
    tp += group_tp;
    fp += group_fp;
    const double cur_fpr = double(fp) / negatives;
    const double cur_tpr = double(tp) / positives;
    auroc += (cur_fpr - prev_fpr) * (prev_tpr + cur_tpr) / 2.0;
    const double recall = double(tp) / positives;
    const double precision = double(tp) / double(tp + fp);
    aupr += (recall - prev_recall) * precision;
    prev_recall = recall;
    roc.push_back({cur_fpr, cur_tpr});
    i = j;
  }

  // FPR at TPR = 0.95, linearly interpolated between the straddling points.
  constexpr double kTargetTpr = 0.95;
  double fpr95 = 1.0;
  for (std::size_t k = 1; k < roc.size(); ++k) {
    if (roc[k].tpr < kTargetTpr) continue;
    // First point at or above the target; the previous one is strictly below,
    // so the segment has positive TPR extent.
    const RocPoint& lo = roc[k - 1];
    const RocPoint& hi = roc[k];
    const double t = (kTargetTpr - lo.tpr) / (hi.tpr - lo.tpr);
    fpr95 = lo.fpr + t * (hi.fpr - lo.fpr);
    break;
  }

  return {auroc, aupr, fpr95};
}

}  // namespace segrobust
