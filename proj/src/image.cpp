#include "segrobust/image.hpp"

#include <sstream>

namespace segrobust {

void validate_labels(const LabelMap& map, int n_classes,
                     const std::string& context) {
  if (map.width() <= 0 || map.height() <= 0)
    throw std::invalid_argument("label map has empty dimensions" +
                                (context.empty() ? "" : " in " + context));
  for (Index y = 0; y < map.height(); ++y) {
    for (Index x = 0; x < map.width(); ++x) {
      const std::uint8_t v = map.grid(y, x);
      if (v == map.ignore_value) continue;
      if (static_cast<int>(v) >= n_classes) {
        std::ostringstream msg;
        msg << "class id out of range at (" << x << "," << y << "): " << int(v)
            << " >= " << n_classes;
        if (!context.empty()) msg << " in " << context;
        throw std::runtime_error(msg.str());
      }
    }
  }
}

ImageGrid<double> luma(const RgbImage& img) {
  ImageGrid<double> out(img.height, img.width);
  for (Index y = 0; y < img.height; ++y)
    for (Index x = 0; x < img.width; ++x)
      out(y, x) = 0.299 * img.channel(y, x, 0) + 0.587 * img.channel(y, x, 1) +
                  0.114 * img.channel(y, x, 2);
  return out;
}

}  // namespace segrobust
