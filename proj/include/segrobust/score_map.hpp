#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "segrobust/image.hpp"

namespace segrobust {

/// Per-pixel score vectors, class-fastest: data[(y * width + x) * n_classes + c].
/// With n_classes >= 2 the vectors are class probabilities and must sum to 1
/// within 1e-4; n_classes == 1 holds raw anomaly scores with no sum rule.
struct ScoreMap {
  Index height = 0;
  Index width = 0;
  int n_classes = 0;
  std::vector<float> data;

  const float* pixel(Index y, Index x) const {
    return data.data() + static_cast<std::size_t>((y * width + x) * n_classes);
  }
};

/// Reads the "SMAP" binary format: magic, u32 height, u32 width,
/// u32 n_classes, then float32 row-major class-fastest payload,
/// all little-endian.
ScoreMap read_score_map(const std::filesystem::path& path);

void write_score_map(const std::filesystem::path& path, const ScoreMap& map);

}  // namespace segrobust
