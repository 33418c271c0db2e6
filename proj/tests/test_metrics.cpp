#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "segrobust/metrics.hpp"
#include "test_util.hpp"

using namespace segrobust;

namespace {

ScoreMap uniform_scores(Index h, Index w, int k) {
  ScoreMap s;
  s.height = h;
  s.width = w;
  s.n_classes = k;
  s.data.assign(std::size_t(h) * w * k, 1.0f / float(k));
  return s;
}

BinaryScoreSet random_score_set(SplitMix64& rng, std::size_t n,
                                bool with_ties = true) {
  BinaryScoreSet set;
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = rng.below(2) == 1;
    double score = with_ties ? double(rng.below(20)) / 19.0 : rng.unit();
    if (pos) score += 0.05 * rng.unit();  // mild separation
    set.add(score, pos);
    (pos ? has_pos : has_neg) = true;
  }
  if (!has_pos) set.add(0.9, true);
  if (!has_neg) set.add(0.1, false);
  return set;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion: gt==pred increments only the diagonal") {
  SplitMix64 rng(1);
  const LabelMap map = testutil::random_label_map(rng, 8, 8, 4);
  ConfusionMatrix cm(4);
  update_confusion(cm, map, map);
  CHECK(cm.counts.sum() == 64);
  CHECK(cm.counts.diagonal().sum() == 64);
}

TEST_CASE("confusion: all-ignore gt leaves the matrix unchanged") {
  LabelMap gt;
  gt.grid = LabelGrid::Constant(3, 3, 255);
  LabelMap pred;
  pred.grid = LabelGrid::Zero(3, 3);
  ConfusionMatrix cm(4);
  update_confusion(cm, gt, pred);
  CHECK(cm.counts.sum() == 0);
}

TEST_CASE("confusion: dimension mismatch") {
  LabelMap a, b;
  a.grid = LabelGrid::Zero(2, 2);
  b.grid = LabelGrid::Zero(2, 3);
  ConfusionMatrix cm(2);
  CHECK_THROWS_AS(update_confusion(cm, a, b), std::invalid_argument);
}

TEST_CASE("confusion: random pair matches the per-pixel tally oracle") {
  SplitMix64 rng(2);
  for (int round = 0; round < 50; ++round) {
    const LabelMap gt = testutil::random_label_map(rng, 8, 8, 5, 0.15);
    const LabelMap pred = testutil::random_label_map(rng, 8, 8, 5);
    ConfusionMatrix cm(5);
    update_confusion(cm, gt, pred);
    for (int g = 0; g < 5; ++g)
      for (int p = 0; p < 5; ++p) {
        std::int64_t expect = 0;
        for (Index y = 0; y < 8; ++y)
          for (Index x = 0; x < 8; ++x)
            if (gt.grid(y, x) == g && pred.grid(y, x) == p) ++expect;
        REQUIRE(cm.counts(g, p) == expect);
      }
  }
}

TEST_CASE("miou: perfect diagonal") {
  ConfusionMatrix cm(2);
  cm.counts << 2, 0, 0, 2;
  CHECK(miou(cm).miou == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("miou: uniform confusion gives 1/3") {
  ConfusionMatrix cm(2);
  cm.counts << 1, 1, 1, 1;
  const IouResult r = miou(cm);
  CHECK(r.per_class[0] == doctest::Approx(1.0 / 3));
  CHECK(r.per_class[1] == doctest::Approx(1.0 / 3));
  CHECK(r.miou == doctest::Approx(1.0 / 3));
}

TEST_CASE("miou: absent class is excluded from the mean") {
  ConfusionMatrix cm(3);
  cm.counts.setZero();
  cm.counts(0, 0) = 4;
  cm.counts(1, 1) = 2;
  cm.counts(1, 0) = 2;
  const IouResult r = miou(cm);
  CHECK(std::isnan(r.per_class[2]));
  CHECK(r.miou == doctest::Approx((4.0 / 6 + 2.0 / 4) / 2));
}

TEST_CASE("miou: empty matrix errors") {
  ConfusionMatrix cm(3);
  CHECK_THROWS_WITH_AS(miou(cm), doctest::Contains("empty IoU mean"),
                       std::runtime_error);
}

TEST_CASE("miou matches the direct oracle on random pairs") {
  SplitMix64 rng(3);
  for (int round = 0; round < 100; ++round) {
    const LabelMap gt = testutil::random_label_map(rng, 10, 10, 6, 0.1);
    const LabelMap pred = testutil::random_label_map(rng, 10, 10, 6);
    ConfusionMatrix cm(6);
    update_confusion(cm, gt, pred);
    REQUIRE(miou(cm).miou ==
            doctest::Approx(oracle::miou_direct(gt, pred, 6)).epsilon(1e-12));
  }
}

TEST_CASE("calibration: confident and correct gives ECE 0, NLL 0") {
  LabelMap gt;
  gt.grid = LabelGrid::Zero(2, 2);
  ScoreMap s = uniform_scores(2, 2, 3);
  for (Index i = 0; i < 4; ++i) {
    s.data[std::size_t(i) * 3 + 0] = 1.f;
    s.data[std::size_t(i) * 3 + 1] = 0.f;
    s.data[std::size_t(i) * 3 + 2] = 0.f;
  }
  CalibrationAccumulator acc;
  calibration_update(acc, s, gt);
  const CalibrationResult r = finalize_calibration(acc);
  CHECK(r.ece == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.nll == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("calibration: one bin, two pixels at 0.8, one correct") {
  LabelMap gt;
  gt.grid.resize(1, 2);
  gt.grid << 0, 1;  // second pixel: top class 0 is wrong
  ScoreMap s;
  s.height = 1;
  s.width = 2;
  s.n_classes = 2;
  s.data = {0.8f, 0.2f, 0.8f, 0.2f};
  CalibrationAccumulator acc;
  calibration_update(acc, s, gt);
  const CalibrationResult r = finalize_calibration(acc);
  CHECK(r.ece == doctest::Approx(std::abs(0.5 - 0.8)).epsilon(1e-6));
}

TEST_CASE("calibration: uniform scores give NLL = ln K") {
  // Power-of-two K keeps 1/K exact in float32, so the match is tight; other
  // K are limited by the score file's float storage.
  for (int k : {2, 4, 16}) {
    LabelMap gt;
    gt.grid = LabelGrid::Zero(4, 4);
    CalibrationAccumulator acc;
    calibration_update(acc, uniform_scores(4, 4, k), gt);
    CHECK(finalize_calibration(acc).nll ==
          doctest::Approx(std::log(double(k))).epsilon(1e-9));
  }
  for (int k : {3, 5, 19}) {
    LabelMap gt;
    gt.grid = LabelGrid::Zero(4, 4);
    CalibrationAccumulator acc;
    calibration_update(acc, uniform_scores(4, 4, k), gt);
    CHECK(finalize_calibration(acc).nll ==
          doctest::Approx(std::log(double(k))).epsilon(1e-6));
  }
}

TEST_CASE("calibration: ignore pixels are skipped") {
  LabelMap gt;
  gt.grid = LabelGrid::Constant(2, 2, 255);
  CalibrationAccumulator acc;
  calibration_update(acc, uniform_scores(2, 2, 3), gt);
  CHECK(acc.pixel_count == 0);
  CHECK_THROWS_AS(finalize_calibration(acc), std::runtime_error);
}

TEST_CASE("calibration: merge order does not change the result") {
  SplitMix64 rng(4);
  std::vector<std::pair<double, bool>> raw;
  CalibrationAccumulator whole;
  std::vector<CalibrationAccumulator> parts(4, CalibrationAccumulator(15));
  for (int i = 0; i < 400; ++i) {
    LabelMap gt;
    gt.grid.resize(1, 1);
    gt.grid << std::uint8_t(rng.below(3));
    ScoreMap s;
    s.height = s.width = 1;
    s.n_classes = 3;
    float a = float(rng.unit()), b = float(rng.unit()), c = float(rng.unit());
    const float sum = a + b + c;
    s.data = {a / sum, b / sum, c / sum};
    calibration_update(whole, s, gt);
    calibration_update(parts[i % 4], s, gt);
    const int top = s.data[0] >= s.data[1] && s.data[0] >= s.data[2] ? 0
                    : s.data[1] >= s.data[2]                         ? 1
                                                                     : 2;
    raw.emplace_back(s.data[top], top == int(gt.grid(0, 0)));
  }
  CalibrationAccumulator merged(15);
  for (const auto& p : parts) merged.merge(p);
  const auto a = finalize_calibration(whole);
  const auto b = finalize_calibration(merged);
  CHECK(a.ece == doctest::Approx(b.ece).epsilon(1e-12));
  CHECK(a.nll == doctest::Approx(b.nll).epsilon(1e-12));
  CHECK(a.ece == doctest::Approx(oracle::ece_direct(raw, 15)).epsilon(1e-9));
}

TEST_CASE("curves: perfect separation") {
  BinaryScoreSet set;
  set.add(0.9, true);
  set.add(0.1, false);
  const CurveResult r = binary_curves(set);
  CHECK(r.auroc == doctest::Approx(1.0));
  CHECK(r.fpr95 == doctest::Approx(0.0));
  CHECK(r.aupr == doctest::Approx(1.0));
}

TEST_CASE("curves: anti-ordered scores give AUROC 0") {
  BinaryScoreSet set;
  set.add(0.1, true);
  set.add(0.9, false);
  CHECK(binary_curves(set).auroc == doctest::Approx(0.0));
}

TEST_CASE("curves: worked 4-point example") {
  BinaryScoreSet set;
  set.add(0.9, true);
  set.add(0.8, false);
  set.add(0.7, true);
  set.add(0.1, false);
  CHECK(binary_curves(set).auroc == doctest::Approx(0.75));
}

TEST_CASE("curves: degenerate sets error naming the missing class") {
  BinaryScoreSet all_pos;
  all_pos.add(0.5, true);
  CHECK_THROWS_WITH_AS(binary_curves(all_pos), doctest::Contains("negative"),
                       std::invalid_argument);
  BinaryScoreSet all_neg;
  all_neg.add(0.5, false);
  CHECK_THROWS_WITH_AS(binary_curves(all_neg), doctest::Contains("positive"),
                       std::invalid_argument);
}

TEST_CASE("curves match the exhaustive oracle on random sets") {
  SplitMix64 rng(5);
  for (int round = 0; round < 100; ++round) {
    const auto set = random_score_set(rng, 20 + rng.below(200));
    const CurveResult r = binary_curves(set);
    REQUIRE(r.auroc == doctest::Approx(oracle::auroc_pairs(set)).epsilon(1e-9));
    REQUIRE(r.auroc ==
            doctest::Approx(oracle::auroc_exhaustive(set)).epsilon(1e-9));
    REQUIRE(r.aupr ==
            doctest::Approx(oracle::aupr_exhaustive(set)).epsilon(1e-9));
    REQUIRE(r.fpr95 ==
            doctest::Approx(oracle::fpr95_exhaustive(set)).epsilon(1e-9));
  }
}

TEST_CASE("curves: cross-class ties count half a pair") {
  // Scores drawn from a tiny grid so positives and negatives tie often; the
  // rank statistic is the ground truth for the 0.5 convention.
  SplitMix64 rng(9);
  for (int round = 0; round < 50; ++round) {
    BinaryScoreSet set;
    for (int i = 0; i < 60; ++i)
      set.add(double(rng.below(5)) / 4.0, rng.below(2) == 1);
    set.add(0.5, true);
    set.add(0.5, false);
    const CurveResult r = binary_curves(set);
    REQUIRE(r.auroc == doctest::Approx(oracle::auroc_pairs(set)).epsilon(1e-9));
    REQUIRE(r.aupr ==
            doctest::Approx(oracle::aupr_exhaustive(set)).epsilon(1e-9));
    REQUIRE(r.fpr95 ==
            doctest::Approx(oracle::fpr95_exhaustive(set)).epsilon(1e-9));
  }
  BinaryScoreSet all_tied;
  all_tied.add(0.3, true);
  all_tied.add(0.3, false);
  all_tied.add(0.3, true);
  CHECK(binary_curves(all_tied).auroc == doctest::Approx(0.5));
}

TEST_CASE("property: AUROC is invariant under strictly monotone transforms") {
  SplitMix64 rng(6);
  for (int round = 0; round < 50; ++round) {
    const auto set = random_score_set(rng, 100);
    BinaryScoreSet warped;
    for (std::size_t i = 0; i < set.size(); ++i)
      warped.add(std::exp(3.0 * set.scores[i]) + 1.0, set.labels[i] != 0);
    REQUIRE(binary_curves(set).auroc ==
            doctest::Approx(binary_curves(warped).auroc).epsilon(1e-12));
  }
}

TEST_CASE("property: fpr95 is non-increasing as positive scores rise") {
  SplitMix64 rng(7);
  for (int round = 0; round < 50; ++round) {
    const auto set = random_score_set(rng, 150);
    BinaryScoreSet raised = set;
    for (std::size_t i = 0; i < raised.size(); ++i)
      if (raised.labels[i]) raised.scores[i] += 0.25;
    const double before = binary_curves(set).fpr95;
    const double after = binary_curves(raised).fpr95;
    REQUIRE(after <= before + 1e-12);
    REQUIRE(after >= 0.0);
    REQUIRE(before <= 1.0);
  }
}

TEST_CASE("confusion merge is associative and commutative") {
  SplitMix64 rng(8);
  ConfusionMatrix a(3), b(3), c(3);
  auto fill = [&rng](ConfusionMatrix& cm) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cm.counts(i, j) = std::int64_t(rng.below(50));
  };
  fill(a);
  fill(b);
  fill(c);
  ConfusionMatrix ab = a;
  ab.merge(b);
  ab.merge(c);
  ConfusionMatrix bc = b;
  bc.merge(c);
  ConfusionMatrix a_bc = a;
  a_bc.merge(bc);
  CHECK(ab.counts == a_bc.counts);
  ConfusionMatrix ba = b;
  ba.merge(a);
  ConfusionMatrix ab2 = a;
  ab2.merge(b);
  CHECK(ab2.counts == ba.counts);
}

}  // TEST_SUITE
