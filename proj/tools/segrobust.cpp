#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segrobust/eval.hpp"
#include "segrobust/frechet.hpp"
#include "segrobust/fs_util.hpp"
#include "segrobust/generate.hpp"
#include "segrobust/injection.hpp"
#include "segrobust/manifest.hpp"
#include "segrobust/morphology.hpp"
#include "segrobust/png_io.hpp"
#include "segrobust/rng.hpp"
#include "segrobust/spectral.hpp"
#include "segrobust/version.hpp"

namespace fs = std::filesystem;
using namespace segrobust;

namespace {

std::vector<int> parse_int_list(const std::string& csv, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "expected a comma-separated int list");
    }
  }
  if (out.empty())
    throw CLI::ValidationError(flag, "expected a comma-separated int list");
  return out;
}

std::vector<int> parse_severities(const std::string& csv) {
  const auto severities = parse_int_list(csv, "--severities");
  for (std::size_t i = 0; i < severities.size(); ++i) {
    if (severities[i] < 0)
      throw CLI::ValidationError("--severities", "radii must be >= 0");
    if (i > 0 && severities[i] <= severities[i - 1])
      throw CLI::ValidationError("--severities", "must be strictly increasing");
  }
  return severities;
}

// "7,5;6,5" -> [{7,5},{6,5}]
std::vector<std::set<int>> parse_class_sets(const std::string& spec) {
  std::vector<std::set<int>> sets;
  std::stringstream ss(spec);
  std::string group;
  while (std::getline(ss, group, ';')) {
    const auto ids = parse_int_list(group, "--classes");
    sets.emplace_back(ids.begin(), ids.end());
  }
  if (sets.empty())
    throw CLI::ValidationError("--classes", "expected at least one class set");
  return sets;
}

std::pair<int, int> parse_count_range(const std::string& spec) {
  const auto colon = spec.find(':');
  std::pair<int, int> range;
  try {
    if (colon == std::string::npos) {
      range.first = range.second = std::stoi(spec);
    } else {
      range = {std::stoi(spec.substr(0, colon)),
               std::stoi(spec.substr(colon + 1))};
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--count", "expected N or MIN:MAX");
  }
  if (range.first < 0 || range.first > range.second)
    throw CLI::ValidationError("--count", "need 0 <= MIN <= MAX");
  return range;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Stable digest of the canonicalized command line: sorted key=value pairs
/// hashed with FNV-1a.
class ConfigDigest {
 public:
  explicit ConfigDigest(std::string command) : canonical_(std::move(command)) {}

  template <typename T>
  ConfigDigest& add(const std::string& key, const T& value) {
    std::ostringstream os;
    os << '|' << key << '=' << value;
    canonical_ += os.str();
    return *this;
  }

  std::string hex() const { return hex64(fnv1a64(canonical_)); }

 private:
  std::string canonical_;
};

void emit_report(const EvalReport& report, const std::string& out) {
  const std::string body = report.to_json();
  if (out == "-") {
    std::cout << body;
    return;
  }
  write_file_atomic(out, body);
}

std::vector<RgbImage> load_image_list(const fs::path& list_path) {
  std::ifstream in(list_path);
  if (!in)
    throw std::runtime_error("cannot open image list: " + list_path.string());
  const fs::path base = fs::absolute(list_path).parent_path();
  std::vector<RgbImage> images;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    fs::path p(line);
    images.push_back(read_png_rgb8(p.is_absolute() ? p : base / p));
  }
  if (images.empty())
    throw std::runtime_error("image list is empty: " + list_path.string());
  return images;
}

struct CommonOpts {
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_seed) {
  cmd->add_option("--workers", opts.workers,
                  "worker threads (0 = hardware concurrency)");
  if (with_seed) cmd->add_option("--seed", opts.seed, "master seed")->required();
}

int run(int argc, char** argv) {
  CLI::App app{"label-map corruption and segmentation robustness metrics"};
  app.set_version_flag("--version", std::string("segrobust ") + kToolVersion);
  app.require_subcommand(1);

  // morph
  auto* morph = app.add_subcommand(
      "morph", "categorical morphology severity sweep over a dataset");
  std::string morph_manifest, morph_op, morph_shape = "square";
  std::string morph_severities = "1,2,3,4,5", morph_order;
  CommonOpts morph_opts;
  morph->add_option("--manifest", morph_manifest, "input dataset manifest")
      ->required();
  morph->add_option("--op", morph_op, "dilate or erode")->required();
  morph->add_option("--shape", morph_shape,
                    "structuring element: square|disk|line_h|line_v");
  morph->add_option("--severities", morph_severities,
                    "comma-separated SE radii, strictly increasing");
  morph->add_option("--order", morph_order,
                    "class-priority JSON (default: built-in chain)");
  morph->add_option("--out", morph_opts.out, "output directory")->required();
  add_common(morph, morph_opts, /*with_seed=*/false);

  // extract-masks
  auto* extract = app.add_subcommand(
      "extract-masks", "build an object-mask bank from a dataset");
  std::string ext_manifest, ext_classes;
  int ext_min_area = kDefaultMinArea;
  CommonOpts ext_opts;
  extract->add_option("--manifest", ext_manifest, "input dataset manifest")
      ->required();
  extract
      ->add_option("--classes", ext_classes,
                   "class sets, e.g. \"7,5;6,5\" (';' separates sets)")
      ->required();
  extract->add_option("--min-area", ext_min_area,
                      "drop components smaller than this many pixels");
  extract->add_option("--out", ext_opts.out, "output bank directory")
      ->required();
  add_common(extract, ext_opts, /*with_seed=*/false);

  // inject
  auto* inject = app.add_subcommand(
      "inject", "synthesize a corrupted or outlier label-map dataset");
  std::string inj_manifest, inj_bank, inj_mode, inj_count = "1:3";
  int inj_relabel = -1;
  CommonOpts inj_opts;
  inject->add_option("--manifest", inj_manifest, "input dataset manifest")
      ->required();
  inject->add_option("--bank", inj_bank, "mask bank index JSON")->required();
  inject->add_option("--mode", inj_mode, "corrupted or outlier")->required();
  inject->add_option("--count", inj_count, "objects per image, N or MIN:MAX");
  inject->add_option("--relabel", inj_relabel,
                     "class id painted over outlier shapes");
  inject->add_option("--out", inj_opts.out, "output directory")->required();
  add_common(inject, inj_opts, /*with_seed=*/true);

  // eval-seg
  auto* eval_seg = app.add_subcommand(
      "eval-seg", "mIoU (and ECE/NLL when score maps are present)");
  std::string es_manifest;
  int es_bins = 15;
  CommonOpts es_opts;
  eval_seg->add_option("--manifest", es_manifest, "manifest with predictions")
      ->required();
  eval_seg->add_option("--bins", es_bins, "ECE confidence bins");
  eval_seg->add_option("--out", es_opts.out, "report path or - for stdout")
      ->required();
  add_common(eval_seg, es_opts, /*with_seed=*/false);

  // eval-ood
  auto* eval_ood_cmd = app.add_subcommand(
      "eval-ood", "AUROC/AUPR/FPR95 of anomaly scores against OOD masks");
  std::string eo_manifest;
  CommonOpts eo_opts;
  eval_ood_cmd
      ->add_option("--manifest", eo_manifest,
                   "manifest with anomaly scores and ood_mask entries")
      ->required();
  eval_ood_cmd->add_option("--out", eo_opts.out, "report path or - for stdout")
      ->required();
  add_common(eval_ood_cmd, eo_opts, /*with_seed=*/false);

  // frechet
  auto* frechet = app.add_subcommand(
      "frechet", "Frechet distance between two feature-embedding files");
  std::string fr_a, fr_b;
  CommonOpts fr_opts;
  frechet->add_option("--features-a", fr_a, "FVEC file A")->required();
  frechet->add_option("--features-b", fr_b, "FVEC file B")->required();
  frechet->add_option("--out", fr_opts.out, "report path or - for stdout")
      ->required();
  add_common(frechet, fr_opts, /*with_seed=*/false);

  // spectral
  auto* spectral_cmd = app.add_subcommand(
      "spectral", "Fourier log-magnitude distance between paired image sets");
  std::string sp_a, sp_b;
  int sp_rate = 0;
  CommonOpts sp_opts;
  spectral_cmd->add_option("--set-a", sp_a, "text file listing PNGs")
      ->required();
  spectral_cmd->add_option("--set-b", sp_b, "text file listing PNGs")
      ->required();
  spectral_cmd->add_option("--filter-rate", sp_rate, "high-pass level 0|1|2")
      ->check(CLI::Range(0, 2));
  spectral_cmd->add_option("--out", sp_opts.out, "report path or - for stdout")
      ->required();
  add_common(spectral_cmd, sp_opts, /*with_seed=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  if (morph->parsed()) {
    // All flag values are checked before any file is touched.
    MorphOp op;
    if (morph_op == "dilate") op = MorphOp::kDilate;
    else if (morph_op == "erode") op = MorphOp::kErode;
    else throw CLI::ValidationError("--op", "must be dilate or erode");
    SeShape shape;
    try {
      shape = se_shape_from_string(morph_shape);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--shape", e.what());
    }
    const auto severities = parse_severities(morph_severities);

    const auto manifest = load_manifest(morph_manifest);
    const auto order = morph_order.empty()
                           ? default_class_order(manifest.ignore_value)
                           : load_class_order(morph_order,
                                              manifest.ignore_value);
    generate_morphological_variant(manifest, shape, severities, op, order,
                                   morph_opts.out, morph_opts.workers);
    return 0;
  }

  if (extract->parsed()) {
    const auto class_sets = parse_class_sets(ext_classes);
    if (ext_min_area < 1)
      throw CLI::ValidationError("--min-area", "must be >= 1");
    const auto manifest = load_manifest(ext_manifest);
    const MaskBank bank = extract_object_masks(manifest, class_sets,
                                               ext_min_area);
    StagingDir staging(ext_opts.out);
    save_mask_bank(bank, staging.path());
    staging.commit();
    std::cerr << "extracted " << bank.entries.size() << " masks\n";
    return 0;
  }

  if (inject->parsed()) {
    if (inj_mode != "corrupted" && inj_mode != "outlier")
      throw CLI::ValidationError("--mode", "must be corrupted or outlier");
    if (inj_relabel > 255)
      throw CLI::ValidationError("--relabel", "must be a class id in [0,255]");
    InjectionPolicy policy;
    std::tie(policy.count_min, policy.count_max) = parse_count_range(inj_count);
    policy.master_seed = inj_opts.seed;
    if (inj_relabel >= 0)
      policy.relabel_class = static_cast<std::uint8_t>(inj_relabel);

    const auto manifest = load_manifest(inj_manifest);
    const MaskBank bank = load_mask_bank(inj_bank);
    if (inj_mode == "corrupted") {
      generate_corrupted_variant(manifest, bank, policy, inj_opts.out,
                                 inj_opts.workers);
    } else {
      generate_outlier_variant(manifest, bank, policy, inj_opts.out,
                               inj_opts.workers);
    }
    return 0;
  }

  if (eval_seg->parsed()) {
    const auto manifest = load_manifest(es_manifest);
    const auto result = evaluate_segmentation(manifest, es_opts.workers, es_bins);
    EvalReport report;
    report.set("miou", result.iou.miou);
    for (std::size_t c = 0; c < result.iou.per_class.size(); ++c)
      if (!std::isnan(result.iou.per_class[c]))
        report.set("iou." + std::to_string(c), result.iou.per_class[c]);
    if (result.has_calibration) {
      report.set("ece", result.calibration.ece);
      report.set("nll", result.calibration.nll);
    }
    report.provenance = {0, kToolVersion,
                         ConfigDigest("eval-seg")
                             .add("manifest", es_manifest)
                             .add("bins", es_bins)
                             .hex(),
                         result.item_count};
    emit_report(report, es_opts.out);
    return 0;
  }

  if (eval_ood_cmd->parsed()) {
    const auto manifest = load_manifest(eo_manifest);
    const CurveResult curves = evaluate_ood(manifest, eo_opts.workers);
    EvalReport report;
    report.set("auroc", curves.auroc);
    report.set("aupr", curves.aupr);
    report.set("fpr95", curves.fpr95);
    report.provenance = {
        0, kToolVersion,
        ConfigDigest("eval-ood").add("manifest", eo_manifest).hex(),
        static_cast<std::int64_t>(manifest.items.size())};
    emit_report(report, eo_opts.out);
    return 0;
  }

  if (frechet->parsed()) {
    const FeatureStats a = fit_feature_stats(read_features(fr_a));
    const FeatureStats b = fit_feature_stats(read_features(fr_b));
    EvalReport report;
    report.set("frechet_distance", frechet_distance(a, b));
    report.provenance = {0, kToolVersion,
                         ConfigDigest("frechet")
                             .add("features-a", fr_a)
                             .add("features-b", fr_b)
                             .hex(),
                         a.count + b.count};
    emit_report(report, fr_opts.out);
    return 0;
  }

  if (spectral_cmd->parsed()) {
    const auto set_a = load_image_list(sp_a);
    const auto set_b = load_image_list(sp_b);
    EvalReport report;
    report.set("spectral_distance", spectral_distance(set_a, set_b, sp_rate));
    report.provenance = {0, kToolVersion,
                         ConfigDigest("spectral")
                             .add("set-a", sp_a)
                             .add("set-b", sp_b)
                             .add("filter-rate", sp_rate)
                             .hex(),
                         static_cast<std::int64_t>(set_a.size())};
    emit_report(report, sp_opts.out);
    return 0;
  }

  std::cerr << "usage error: no subcommand given\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Flag-value validation that only happens once the command runs.
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
