#include "segrobust/manifest.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segrobust/png_io.hpp"

namespace segrobust {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& rel) {
  std::filesystem::path p(rel);
  return p.is_absolute() ? p : base / p;
}

// Paths inside the manifest directory are written relative so the dataset
// stays relocatable; anything outside (e.g. pass-through images) is written
// absolute.
std::string relativize(const std::filesystem::path& path,
                       const std::filesystem::path& base) {
  const auto abs_path = std::filesystem::absolute(path).lexically_normal();
  const auto abs_base = std::filesystem::absolute(base).lexically_normal();
  const auto rel = abs_path.lexically_relative(abs_base);
  if (rel.empty() || rel.native().starts_with(".."))
    return abs_path.generic_string();
  return rel.generic_string();
}

}  // namespace

const ManifestItem& DatasetManifest::item(const std::string& id) const {
  for (const auto& it : items)
    if (it.id == id) return it;
  throw std::runtime_error("manifest has no item with id '" + id + "'");
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("manifest parse failure in " + path.string() +
                             ": " + e.what());
  }

  DatasetManifest m;
  m.directory = std::filesystem::absolute(path).parent_path();
  if (!j.contains("n_classes") || !j["n_classes"].is_number_integer())
    throw std::runtime_error("manifest missing integer 'n_classes': " +
                             path.string());
  m.n_classes = j["n_classes"].get<int>();
  if (m.n_classes < 2)
    throw std::runtime_error("manifest n_classes must be >= 2, got " +
                             std::to_string(m.n_classes));
  const int ignore = j.value("ignore_value", int(kDefaultIgnoreValue));
  if (ignore < 0 || ignore > 255)
    throw std::runtime_error("ignore_value must be in [0,255]");
  m.ignore_value = static_cast<std::uint8_t>(ignore);

  if (!j.contains("items") || !j["items"].is_array())
    throw std::runtime_error("manifest missing 'items' array: " +
                             path.string());
  std::set<std::string> seen_ids;
  for (const auto& ji : j["items"]) {
    ManifestItem item;
    item.id = ji.at("id").get<std::string>();
    if (!seen_ids.insert(item.id).second)
      throw std::runtime_error("duplicate item id '" + item.id + "' in " +
                               path.string());
    item.label = resolve(m.directory, ji.at("label").get<std::string>());
    std::set<std::string> paths{item.label.string()};
    auto take = [&](const char* key) -> std::optional<std::filesystem::path> {
      if (!ji.contains(key)) return std::nullopt;
      auto p = resolve(m.directory, ji.at(key).get<std::string>());
      if (!paths.insert(p.string()).second)
        throw std::runtime_error("item '" + item.id +
                                 "' lists the same path twice: " + p.string());
      return p;
    };
    item.image = take("image");
    item.prediction = take("prediction");
    item.scores = take("scores");
    item.ood_mask = take("ood_mask");
    m.items.push_back(std::move(item));
  }
  if (j.contains("class_names")) {
    m.class_names = j["class_names"].get<std::vector<std::string>>();
    if (!m.class_names.empty() &&
        m.class_names.size() != static_cast<std::size_t>(m.n_classes))
      throw std::runtime_error("class_names length does not match n_classes");
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path) {
  const auto base = std::filesystem::absolute(path).parent_path();
  json j;
  j["n_classes"] = manifest.n_classes;
  j["ignore_value"] = int(manifest.ignore_value);
  j["items"] = json::array();
  for (const auto& item : manifest.items) {
    json ji;
    ji["id"] = item.id;
    ji["label"] = relativize(item.label, base);
    if (item.image) ji["image"] = relativize(*item.image, base);
    if (item.prediction) ji["prediction"] = relativize(*item.prediction, base);
    if (item.scores) ji["scores"] = relativize(*item.scores, base);
    if (item.ood_mask) ji["ood_mask"] = relativize(*item.ood_mask, base);
    j["items"].push_back(std::move(ji));
  }
  if (!manifest.class_names.empty()) j["class_names"] = manifest.class_names;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

LabelMap load_label_map(const std::filesystem::path& path,
                        const DatasetManifest& manifest) {
  LabelMap map;
  map.grid = read_png_grey8(path);
  map.ignore_value = manifest.ignore_value;
  validate_labels(map, manifest.n_classes, path.string());
  return map;
}

void save_label_map(const LabelMap& map, const std::filesystem::path& path) {
  write_png_grey8(path, map.grid);
}

void EvalReport::set(const std::string& key, double value) {
  if (!is_known_metric_key(key))
    throw std::logic_error("unknown metric key: " + key);
  metrics[key] = value;
}

bool is_known_metric_key(const std::string& key) {
  static const std::set<std::string> fixed = {
      "miou", "ece",   "nll",
      "auroc", "aupr", "fpr95",
      "frechet_distance", "spectral_distance"};
  if (fixed.count(key)) return true;
  static const std::regex per_class(R"(iou\.\d{1,3})");
  return std::regex_match(key, per_class);
}

std::string EvalReport::to_json() const {
  json j;
  j["metrics"] = json::object();
  for (const auto& [k, v] : metrics) j["metrics"][k] = v;
  j["provenance"] = {
      {"master_seed", provenance.master_seed},
      {"tool_version", provenance.tool_version},
      {"config_digest", provenance.config_digest},
      {"item_count", provenance.item_count},
  };
  return j.dump(2) + "\n";
}

}  // namespace segrobust
