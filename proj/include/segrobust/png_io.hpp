#pragma once

#include <filesystem>

#include "segrobust/image.hpp"

namespace segrobust {

/// Reads a single-channel 8-bit PNG. 1-, 2- and 4-bit greyscale files are
/// expanded to 8 bits; anything with more channels or 16-bit depth is
/// rejected.
LabelGrid read_png_grey8(const std::filesystem::path& path);

void write_png_grey8(const std::filesystem::path& path, const LabelGrid& grid);

RgbImage read_png_rgb8(const std::filesystem::path& path);

void write_png_rgb8(const std::filesystem::path& path, const RgbImage& img);

/// Reads a 1-bit greyscale PNG as a 0/1 mask (any nonzero byte counts as set
/// when the file is 8-bit).
MaskGrid read_png_mask(const std::filesystem::path& path);

/// Writes a 0/1 mask as a 1-bit greyscale PNG.
void write_png_mask(const std::filesystem::path& path, const MaskGrid& mask);

}  // namespace segrobust
