#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "segrobust/image.hpp"
#include "segrobust/rng.hpp"

namespace testutil {

/// Self-deleting scratch directory.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("segrobust-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline segrobust::LabelMap random_label_map(segrobust::SplitMix64& rng,
                                            segrobust::Index h,
                                            segrobust::Index w, int n_classes,
                                            double ignore_fraction = 0.0) {
  segrobust::LabelMap map;
  map.grid.resize(h, w);
  for (segrobust::Index y = 0; y < h; ++y)
    for (segrobust::Index x = 0; x < w; ++x)
      map.grid(y, x) =
          (ignore_fraction > 0.0 && rng.unit() < ignore_fraction)
              ? map.ignore_value
              : static_cast<std::uint8_t>(rng.below(n_classes));
  return map;
}

inline segrobust::ImageGrid<float> random_grey(segrobust::SplitMix64& rng,
                                               segrobust::Index h,
                                               segrobust::Index w) {
  segrobust::ImageGrid<float> img(h, w);
  for (segrobust::Index y = 0; y < h; ++y)
    for (segrobust::Index x = 0; x < w; ++x)
      img(y, x) = static_cast<float>(rng.in(-100, 100));
  return img;
}

}  // namespace testutil
