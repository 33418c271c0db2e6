#include "segrobust/morphology.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace segrobust {

SeShape se_shape_from_string(const std::string& name) {
  if (name == "square") return SeShape::kSquare;
  if (name == "disk") return SeShape::kDisk;
  if (name == "line_h") return SeShape::kLineH;
  if (name == "line_v") return SeShape::kLineV;
  throw std::invalid_argument("unknown structuring-element shape: " + name);
}

std::string to_string(SeShape shape) {
  switch (shape) {
    case SeShape::kSquare: return "square";
    case SeShape::kDisk: return "disk";
    case SeShape::kLineH: return "line_h";
    case SeShape::kLineV: return "line_v";
  }
  throw std::logic_error("unreachable");
}

bool StructuringElement::is_symmetric() const {
  for (const SeOffset& o : offsets)
    if (!std::binary_search(offsets.begin(), offsets.end(),
                            SeOffset{-o.dy, -o.dx}))
      return false;
  return true;
}

StructuringElement make_structuring_element(SeShape shape, int radius) {
  if (radius < 0)
    throw std::invalid_argument("structuring-element radius must be >= 0");
  StructuringElement se;
  se.shape = shape;
  se.radius = radius;
  switch (shape) {
    case SeShape::kSquare:
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
          se.offsets.push_back({dy, dx});
      break;
    case SeShape::kDisk:
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
          if (dy * dy + dx * dx <= radius * radius)
            se.offsets.push_back({dy, dx});
      break;
    case SeShape::kLineH:
      for (int dx = -radius; dx <= radius; ++dx) se.offsets.push_back({0, dx});
      break;
    case SeShape::kLineV:
      for (int dy = -radius; dy <= radius; ++dy) se.offsets.push_back({dy, 0});
      break;
  }
  std::sort(se.offsets.begin(), se.offsets.end());
  return se;
}

ClassPriorityOrder::ClassPriorityOrder(const std::map<int, int>& ranks,
                                       std::uint8_t ignore_value) {
  ranks_.fill(0);
  std::map<int, int> rank_owner;
  for (const auto& [cls, rank] : ranks) {
    if (cls < 0 || cls > 255)
      throw std::invalid_argument("class id out of [0,255] in priority order: " +
                                  std::to_string(cls));
    if (cls == int(ignore_value))
      throw std::invalid_argument(
          "ignore value may not appear in the priority order");
    if (rank < 1)
      throw std::invalid_argument("ranks must be >= 1, got " +
                                  std::to_string(rank) + " for class " +
                                  std::to_string(cls));
    auto [it, inserted] = rank_owner.emplace(rank, cls);
    if (!inserted)
      throw std::invalid_argument("rank " + std::to_string(rank) +
                                  " assigned to both class " +
                                  std::to_string(it->second) + " and class " +
                                  std::to_string(cls));
    ranks_[cls] = rank;
  }
  listed_ = ranks;
}

ImageGrid<int> ClassPriorityOrder::rank_image(const LabelMap& map) const {
  ImageGrid<int> out(map.height(), map.width());
  for (Index y = 0; y < map.height(); ++y)
    for (Index x = 0; x < map.width(); ++x) out(y, x) = ranks_[map.grid(y, x)];
  return out;
}

ClassPriorityOrder load_class_order(const std::filesystem::path& path,
                                    std::uint8_t ignore_value) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open class order file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("class order parse failure in " + path.string() +
                             ": " + e.what());
  }
  if (!j.contains("ranks") || !j["ranks"].is_object())
    throw std::runtime_error("class order file needs a 'ranks' object: " +
                             path.string());
  std::map<int, int> ranks;
  for (const auto& [key, value] : j["ranks"].items()) {
    int cls = 0;
    try {
      std::size_t used = 0;
      cls = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw std::runtime_error("class order key is not a class id: '" + key +
                               "' in " + path.string());
    }
    ranks[cls] = value.get<int>();
  }
  return ClassPriorityOrder(ranks, ignore_value);
}

std::map<int, int> default_class_order_ranks() {
  // Cityscapes train ids, small objects ranked highest:
  // traffic sign(7) > traffic light(6) > person(11) > car(13) >
  // bicycle(18) > truck(14) > train(16).
  return {{7, 7}, {6, 6}, {11, 5}, {13, 4}, {18, 3}, {14, 2}, {16, 1}};
}

ClassPriorityOrder default_class_order(std::uint8_t ignore_value) {
  return ClassPriorityOrder(default_class_order_ranks(), ignore_value);
}

LabelMap categorical_morph(const LabelMap& map, const StructuringElement& se,
                           const ClassPriorityOrder& order, MorphOp op) {
  if (map.grid.size() == 0)
    throw std::invalid_argument("categorical_morph: empty label map");
  if (!se.contains_origin())
    throw std::invalid_argument(
        "structuring element must contain the origin");
  const Index h = map.height(), w = map.width();
  const ImageGrid<int> ranks = order.rank_image(map);
  const bool dilate = op == MorphOp::kDilate;

  LabelMap out;
  out.ignore_value = map.ignore_value;
  out.grid.resize(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      bool seen = false;
      int best_rank = 0;
      std::uint8_t best_class = 0;
      for (const SeOffset& o : se.offsets) {
        const Index qy = y - o.dy, qx = x - o.dx;
        if (qy < 0 || qy >= h || qx < 0 || qx >= w) continue;
        const int r = ranks(qy, qx);
        // Strict comparison keeps the first offset in (dy, dx) order on ties.
        if (!seen || (dilate ? r > best_rank : r < best_rank)) {
          best_rank = r;
          best_class = map.grid(qy, qx);
          seen = true;
        }
      }
      out.grid(y, x) = best_class;
    }
  }
  return out;
}

}  // namespace segrobust
