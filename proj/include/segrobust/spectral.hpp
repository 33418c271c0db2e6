#pragma once

#include <filesystem>
#include <vector>

#include "segrobust/image.hpp"

namespace segrobust {

/// Centered log-magnitude spectrum, same dimensions as the source image; the
/// zero-frequency bin sits at (rows/2, cols/2).
using Spectrum = ImageGrid<double>;

/// Luma -> 2-D DFT -> log(1 + |.|) -> center shift. Needs width, height >= 2.
Spectrum spectrum(const RgbImage& img);

/// Spectrum of an already-scalar image (used for oracle checks and label
/// renderings).
Spectrum spectrum(const ImageGrid<double>& grey);

/// Normalized radial frequency of each bin: 0 at the centered DC bin, 1 at
/// the farthest image corner.
ImageGrid<double> radial_frequency(Index rows, Index cols);

/// High-pass cutoff per discrete filter rate: 0 -> no filter, 1 -> 0.25,
/// 2 -> 0.5 of the corner-normalized radius.
double filter_cutoff(int filter_rate);

/// Mean absolute log-magnitude difference over bins with radius >= cutoff.
double spectral_distance(const Spectrum& a, const Spectrum& b,
                         int filter_rate);

/// Mean of per-pair spectral distances over two paired image lists.
double spectral_distance(const std::vector<RgbImage>& set_a,
                         const std::vector<RgbImage>& set_b, int filter_rate);

}  // namespace segrobust
