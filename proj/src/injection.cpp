#include "segrobust/injection.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segrobust/png_io.hpp"

namespace segrobust {

using nlohmann::json;

Index ObjectMask::pixel_count() const {
  return static_cast<Index>((bitmap != 0).count());
}

void ObjectMask::validate(int n_classes, std::uint8_t ignore_value) const {
  if (class_id == ignore_value)
    throw std::invalid_argument("object mask may not carry the ignore value");
  if (static_cast<int>(class_id) >= n_classes)
    throw std::invalid_argument("object mask class " +
                                std::to_string(int(class_id)) +
                                " out of range for n_classes " +
                                std::to_string(n_classes));
  if (bitmap.rows() != bbox.height || bitmap.cols() != bbox.width)
    throw std::invalid_argument("object mask bitmap does not match its bbox");
  if (pixel_count() == 0)
    throw std::invalid_argument("object mask has no set pixels");
  // Tightness: each bbox edge must touch at least one set pixel.
  const bool top = (bitmap.row(0) != 0).any();
  const bool bottom = (bitmap.row(bitmap.rows() - 1) != 0).any();
  const bool left = (bitmap.col(0) != 0).any();
  const bool right = (bitmap.col(bitmap.cols() - 1) != 0).any();
  if (!(top && bottom && left && right))
    throw std::invalid_argument("object mask bbox is not tight");
}

namespace {

struct Component {
  std::vector<std::pair<Index, Index>> pixels;  // (y, x)
  std::array<std::int64_t, 256> class_histogram{};
};

// 4-connected flood fill over the "class in set" predicate.
std::vector<Component> connected_components(const LabelMap& map,
                                            const std::set<int>& class_set) {
  const Index h = map.height(), w = map.width();
  MaskGrid member(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      member(y, x) = class_set.count(int(map.grid(y, x))) ? 1 : 0;

  std::vector<Component> components;
  MaskGrid visited = MaskGrid::Zero(h, w);
  const int dy[4] = {-1, 1, 0, 0};
  const int dx[4] = {0, 0, -1, 1};
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      if (!member(y, x) || visited(y, x)) continue;
      Component comp;
      std::queue<std::pair<Index, Index>> frontier;
      frontier.push({y, x});
      visited(y, x) = 1;
      while (!frontier.empty()) {
        auto [cy, cx] = frontier.front();
        frontier.pop();
        comp.pixels.emplace_back(cy, cx);
        ++comp.class_histogram[map.grid(cy, cx)];
        for (int k = 0; k < 4; ++k) {
          const Index ny = cy + dy[k], nx = cx + dx[k];
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          if (!member(ny, nx) || visited(ny, nx)) continue;
          visited(ny, nx) = 1;
          frontier.push({ny, nx});
        }
      }
      components.push_back(std::move(comp));
    }
  }
  return components;
}

ObjectMask component_to_mask(const Component& comp, const std::string& item_id) {
  Index min_y = comp.pixels[0].first, max_y = min_y;
  Index min_x = comp.pixels[0].second, max_x = min_x;
  for (const auto& [y, x] : comp.pixels) {
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
  }
  ObjectMask mask;
  mask.bbox = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
  mask.bitmap = MaskGrid::Zero(mask.bbox.height, mask.bbox.width);
  for (const auto& [y, x] : comp.pixels) mask.bitmap(y - min_y, x - min_x) = 1;
  std::int64_t best = -1;
  for (int c = 0; c < 256; ++c) {
    if (comp.class_histogram[c] > best) {  // smallest id wins ties
      best = comp.class_histogram[c];
      mask.class_id = static_cast<std::uint8_t>(c);
    }
  }
  mask.source_item = item_id;
  return mask;
}

}  // namespace

MaskBank extract_object_masks(const DatasetManifest& manifest,
                              const std::vector<std::set<int>>& class_sets,
                              int min_area) {
  if (class_sets.empty())
    throw std::invalid_argument("extract_object_masks: no class sets given");
  for (const auto& set : class_sets) {
    if (set.empty())
      throw std::invalid_argument("extract_object_masks: empty class set");
    for (int c : set)
      if (c < 0 || c >= manifest.n_classes || c == int(manifest.ignore_value))
        throw std::invalid_argument("invalid class id in class set: " +
                                    std::to_string(c));
  }

  MaskBank bank;
  bank.class_filter = class_sets;
  for (const auto& item : manifest.items) {
    const LabelMap map = load_label_map(item.label, manifest);
    for (const auto& class_set : class_sets) {
      for (const Component& comp : connected_components(map, class_set)) {
        if (static_cast<int>(comp.pixels.size()) < min_area) continue;
        ObjectMask mask = component_to_mask(comp, item.id);
        mask.validate(manifest.n_classes, manifest.ignore_value);
        bank.entries.push_back(std::move(mask));
      }
    }
  }
  return bank;
}

ObjectMask place_mask(const ObjectMask& mask, Index dx, Index dy,
                      Index canvas_w, Index canvas_h) {
  ObjectMask moved = mask;
  moved.bbox.x0 += dx;
  moved.bbox.y0 += dy;
  if (moved.bbox.x0 < 0 || moved.bbox.y0 < 0 ||
      moved.bbox.x0 + moved.bbox.width > canvas_w ||
      moved.bbox.y0 + moved.bbox.height > canvas_h) {
    std::ostringstream msg;
    msg << "mask placement out of bounds: bbox (" << moved.bbox.x0 << ","
        << moved.bbox.y0 << "," << moved.bbox.width << "," << moved.bbox.height
        << ") vs canvas " << canvas_w << "x" << canvas_h;
    throw std::invalid_argument(msg.str());
  }
  return moved;
}

LabelMap mix_labels(const LabelMap& base, const ObjectMask& obj) {
  if (obj.bbox.x0 < 0 || obj.bbox.y0 < 0 ||
      obj.bbox.x0 + obj.bbox.width > base.width() ||
      obj.bbox.y0 + obj.bbox.height > base.height())
    throw std::invalid_argument("object bbox exceeds base label map");
  LabelMap out = base;
  for (Index by = 0; by < obj.bbox.height; ++by)
    for (Index bx = 0; bx < obj.bbox.width; ++bx)
      if (obj.bitmap(by, bx))
        out.grid(obj.bbox.y0 + by, obj.bbox.x0 + bx) = obj.class_id;
  return out;
}

void mark_coverage(MaskGrid& ood, const ObjectMask& obj) {
  for (Index by = 0; by < obj.bbox.height; ++by)
    for (Index bx = 0; bx < obj.bbox.width; ++bx)
      if (obj.bitmap(by, bx)) ood(obj.bbox.y0 + by, obj.bbox.x0 + bx) = 1;
}

void save_mask_bank(const MaskBank& bank, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json j;
  j["class_filter"] = json::array();
  for (const auto& set : bank.class_filter)
    j["class_filter"].push_back(std::vector<int>(set.begin(), set.end()));
  j["entries"] = json::array();
  for (std::size_t i = 0; i < bank.entries.size(); ++i) {
    const ObjectMask& m = bank.entries[i];
    std::ostringstream name;
    name << "mask_" << std::setw(5) << std::setfill('0') << i << ".png";
    write_png_mask(dir / name.str(), m.bitmap);
    j["entries"].push_back(
        {{"id", "mask_" + std::to_string(i)},
         {"class_id", int(m.class_id)},
         {"bbox", {m.bbox.x0, m.bbox.y0, m.bbox.width, m.bbox.height}},
         {"bitmap", name.str()},
         {"source_item", m.source_item}});
  }
  std::ofstream out(dir / "bank.json");
  if (!out)
    throw std::runtime_error("cannot write bank index under " + dir.string());
  out << j.dump(2) << "\n";
}

MaskBank load_mask_bank(const std::filesystem::path& index_path) {
  std::ifstream in(index_path);
  if (!in)
    throw std::runtime_error("cannot open bank index: " + index_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("bank index parse failure in " +
                             index_path.string() + ": " + e.what());
  }
  const auto base = std::filesystem::absolute(index_path).parent_path();
  MaskBank bank;
  for (const auto& set : j.value("class_filter", json::array()))
    bank.class_filter.emplace_back(set.begin(), set.end());
  for (const auto& je : j.at("entries")) {
    ObjectMask m;
    m.class_id = static_cast<std::uint8_t>(je.at("class_id").get<int>());
    const auto& bb = je.at("bbox");
    m.bbox = {bb.at(0).get<Index>(), bb.at(1).get<Index>(),
              bb.at(2).get<Index>(), bb.at(3).get<Index>()};
    m.bitmap = read_png_mask(base / je.at("bitmap").get<std::string>());
    m.source_item = je.value("source_item", std::string("imported"));
    if (m.bitmap.rows() != m.bbox.height || m.bitmap.cols() != m.bbox.width)
      throw std::runtime_error("bank entry bitmap does not match its bbox: " +
                               je.at("bitmap").get<std::string>());
    bank.entries.push_back(std::move(m));
  }
  return bank;
}

MaskBank synthetic_silhouette_bank() {
  MaskBank bank;
  auto add = [&bank](MaskGrid bitmap, const char* tag) {
    ObjectMask m;
    // Trim to the tight bbox so the invariants hold for any shape below.
    Index min_y = bitmap.rows(), max_y = -1, min_x = bitmap.cols(), max_x = -1;
    for (Index y = 0; y < bitmap.rows(); ++y)
      for (Index x = 0; x < bitmap.cols(); ++x)
        if (bitmap(y, x)) {
          min_y = std::min(min_y, y);
          max_y = std::max(max_y, y);
          min_x = std::min(min_x, x);
          max_x = std::max(max_x, x);
        }
    m.bitmap = bitmap.block(min_y, min_x, max_y - min_y + 1, max_x - min_x + 1);
    m.bbox = {0, 0, m.bitmap.cols(), m.bitmap.rows()};
    m.class_id = 0;  // callers relabel on injection
    m.source_item = tag;
    bank.entries.push_back(std::move(m));
  };

  // Round blob.
  MaskGrid blob = MaskGrid::Zero(15, 15);
  for (Index y = 0; y < 15; ++y)
    for (Index x = 0; x < 15; ++x)
      if ((y - 7) * (y - 7) + (x - 7) * (x - 7) <= 45) blob(y, x) = 1;
  add(blob, "synthetic/blob");

  // Wide ellipse.
  MaskGrid ellipse = MaskGrid::Zero(11, 21);
  for (Index y = 0; y < 11; ++y)
    for (Index x = 0; x < 21; ++x) {
      const double ny = (y - 5.0) / 5.0, nx = (x - 10.0) / 10.0;
      if (ny * ny + nx * nx <= 1.0) ellipse(y, x) = 1;
    }
  add(ellipse, "synthetic/ellipse");

  // Convex polygon (a squat pentagon), rasterized by half-plane tests.
  MaskGrid poly = MaskGrid::Zero(17, 17);
  const double vx[5] = {8, 16, 13, 3, 0};
  const double vy[5] = {0, 6, 16, 16, 6};
  for (Index y = 0; y < 17; ++y)
    for (Index x = 0; x < 17; ++x) {
      bool inside = true;
      for (int k = 0; k < 5 && inside; ++k) {
        const int n = (k + 1) % 5;
        const double cross = (vx[n] - vx[k]) * (y - vy[k]) -
                             (vy[n] - vy[k]) * (x - vx[k]);
        inside = cross >= 0;
      }
      if (inside) poly(y, x) = 1;
    }
  add(poly, "synthetic/polygon");

  for (auto& m : bank.entries) m.validate(256, kDefaultIgnoreValue);
  return bank;
}

}  // namespace segrobust
