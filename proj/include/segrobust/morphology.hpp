#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "segrobust/image.hpp"

namespace segrobust {

enum class MorphOp { kDilate, kErode };

enum class SeShape { kSquare, kDisk, kLineH, kLineV };

SeShape se_shape_from_string(const std::string& name);
std::string to_string(SeShape shape);

struct SeOffset {
  int dy = 0;
  int dx = 0;
  auto operator<=>(const SeOffset&) const = default;
};

/// Flat structuring element: the support B, with the structuring function
/// identically zero. Offsets are kept sorted ascending by (dy, dx); that
/// order is the tie-break rule for categorical operators.
struct StructuringElement {
  std::vector<SeOffset> offsets;
  SeShape shape = SeShape::kSquare;
  int radius = 0;

  bool contains_origin() const {
    return std::binary_search(offsets.begin(), offsets.end(), SeOffset{0, 0});
  }
  bool is_symmetric() const;
};

/// square -> all |dy|,|dx| <= radius; disk -> dy^2+dx^2 <= radius^2;
/// line_h / line_v -> 1-D segments of half-length radius. radius 0 always
/// yields the identity element {(0,0)}.
StructuringElement make_structuring_element(SeShape shape, int radius);

/// Total pre-order on classes for categorical morphology. Listed classes get
/// distinct ranks >= 1; every other class, including the ignore value, ranks
/// 0 (background is the smallest element).
class ClassPriorityOrder {
 public:
  ClassPriorityOrder() { ranks_.fill(0); }
  ClassPriorityOrder(const std::map<int, int>& ranks, std::uint8_t ignore_value);

  int rank(std::uint8_t class_id) const { return ranks_[class_id]; }
  const std::map<int, int>& listed() const { return listed_; }

  ImageGrid<int> rank_image(const LabelMap& map) const;

 private:
  std::array<int, 256> ranks_;
  std::map<int, int> listed_;
};

/// Order file schema: {"ranks": {"<class_id>": rank, ...}}.
ClassPriorityOrder load_class_order(const std::filesystem::path& path,
                                    std::uint8_t ignore_value);

/// The built-in ordering chain for Cityscapes train ids:
/// traffic sign > traffic light > person > car > cycle > truck > train.
ClassPriorityOrder default_class_order(std::uint8_t ignore_value);
std::map<int, int> default_class_order_ranks();

/// Flat grey-level erosion/dilation:
///   erode(x)(p)  = min over h in B of x(p - h)
///   dilate(x)(p) = max over h in B of x(p - h)
/// The window is clipped to the image domain, so border pixels see a smaller
/// neighborhood; no padding value is ever introduced.
template <typename Scalar>
ImageGrid<Scalar> grey_morph(const ImageGrid<Scalar>& img,
                             const StructuringElement& se, MorphOp op) {
  if (img.size() == 0) throw std::invalid_argument("grey_morph: empty image");
  const Index h = img.rows(), w = img.cols();
  ImageGrid<Scalar> out(h, w);
  const bool dilate = op == MorphOp::kDilate;
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      bool seen = false;
      Scalar best{};
      for (const SeOffset& o : se.offsets) {
        const Index qy = y - o.dy, qx = x - o.dx;
        if (qy < 0 || qy >= h || qx < 0 || qx >= w) continue;
        const Scalar v = img(qy, qx);
        if (!seen || (dilate ? v > best : v < best)) {
          best = v;
          seen = true;
        }
      }
      out(y, x) = best;  // origin in B guarantees a nonempty window
    }
  }
  return out;
}

/// Categorical erosion/dilation by rank. For each pixel the in-bounds window
/// pixel with extremal rank is selected and its class written back; rank ties
/// go to the first offset in ascending (dy, dx) order, so classes sharing
/// rank 0 (including ignore) are handled deterministically.
LabelMap categorical_morph(const LabelMap& map, const StructuringElement& se,
                           const ClassPriorityOrder& order, MorphOp op);

}  // namespace segrobust
