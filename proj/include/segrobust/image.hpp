#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace segrobust {

using Index = Eigen::Index;

/// Dense row-major 2-D grid; (row, col) indexing, row 0 is the top scanline.
template <typename Scalar>
using ImageGrid =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using LabelGrid = ImageGrid<std::uint8_t>;
using GreyImage = ImageGrid<float>;
using MaskGrid = ImageGrid<std::uint8_t>;  // entries 0 or 1

constexpr std::uint8_t kDefaultIgnoreValue = 255;

/// Per-pixel class-id image. Values are either a class id in [0, n_classes)
/// of the owning manifest or ignore_value; validate_labels() enforces this.
struct LabelMap {
  LabelGrid grid;
  std::uint8_t ignore_value = kDefaultIgnoreValue;

  Index height() const { return grid.rows(); }
  Index width() const { return grid.cols(); }

  bool same_shape(const LabelMap& other) const {
    return grid.rows() == other.grid.rows() && grid.cols() == other.grid.cols();
  }
};

/// Interleaved 8-bit RGB image.
struct RgbImage {
  Index width = 0;
  Index height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height, RGBRGB...

  std::uint8_t channel(Index y, Index x, int c) const {
    return data[static_cast<std::size_t>(3 * (y * width + x) + c)];
  }
};

/// Throws if any non-ignore pixel is >= n_classes; the message names the
/// offending (x, y) coordinate.
void validate_labels(const LabelMap& map, int n_classes,
                     const std::string& context = {});

/// Rec. 601 luma of an RGB image as a double grid in [0, 255].
ImageGrid<double> luma(const RgbImage& img);

}  // namespace segrobust
