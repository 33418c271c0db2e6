#include "segrobust/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace segrobust {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f)
    throw std::runtime_error("cannot open '" + path.string() + "' for " +
                             (mode[0] == 'r' ? "reading" : "writing"));
  return f;
}

[[noreturn]] void fail(const std::filesystem::path& path, const char* what) {
  throw std::runtime_error(std::string(what) + ": " + path.string());
}

class PngReader {
 public:
  explicit PngReader(const std::filesystem::path& path)
      : path_(path), file_(open_file(path, "rb")) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                  nullptr);
    if (!png_) fail(path_, "png_create_read_struct failed");
    info_ = png_create_info_struct(png_);
    if (!info_) fail(path_, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(png_))) fail(path_, "not a valid PNG file");
    png_init_io(png_, file_.get());
    png_read_info(png_, info_);
  }

  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }

  /// Decodes as 8-bit greyscale rows; low-bit-depth files are expanded,
  /// anything else is rejected.
  LabelGrid read_grey8() {
    if (setjmp(png_jmpbuf(png_))) fail(path_, "PNG decode error");
    const int color = png_get_color_type(png_, info_);
    const int depth = png_get_bit_depth(png_, info_);
    if (color != PNG_COLOR_TYPE_GRAY)
      fail(path_, "expected a single-channel greyscale PNG");
    if (depth > 8) fail(path_, "expected bit depth <= 8");
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png_);
    png_read_update_info(png_, info_);

    const Index h = png_get_image_height(png_, info_);
    const Index w = png_get_image_width(png_, info_);
    LabelGrid grid(h, w);
    std::vector<png_bytep> rows(h);
    for (Index y = 0; y < h; ++y) rows[y] = grid.data() + y * w;
    png_read_image(png_, rows.data());
    png_read_end(png_, nullptr);
    return grid;
  }

  RgbImage read_rgb8() {
    if (setjmp(png_jmpbuf(png_))) fail(path_, "PNG decode error");
    const int color = png_get_color_type(png_, info_);
    const int depth = png_get_bit_depth(png_, info_);
    if (depth != 8) fail(path_, "expected an 8-bit PNG");
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_);
    if (color == PNG_COLOR_TYPE_GRAY) png_set_gray_to_rgb(png_);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png_);
    png_read_update_info(png_, info_);
    if (png_get_channels(png_, info_) != 3)
      fail(path_, "cannot decode to 3-channel RGB");

    RgbImage img;
    img.height = png_get_image_height(png_, info_);
    img.width = png_get_image_width(png_, info_);
    img.data.resize(static_cast<std::size_t>(3 * img.width * img.height));
    std::vector<png_bytep> rows(img.height);
    for (Index y = 0; y < img.height; ++y)
      rows[y] = img.data.data() + 3 * y * img.width;
    png_read_image(png_, rows.data());
    png_read_end(png_, nullptr);
    return img;
  }

 private:
  std::filesystem::path path_;
  FilePtr file_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriter {
 public:
  explicit PngWriter(const std::filesystem::path& path)
      : path_(path), file_(open_file(path, "wb")) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                   nullptr);
    if (!png_) fail(path_, "png_create_write_struct failed");
    info_ = png_create_info_struct(png_);
    if (!info_) fail(path_, "png_create_info_struct failed");
  }

  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }

  void write(Index width, Index height, int bit_depth, int color_type,
             const std::vector<png_bytep>& rows) {
    if (setjmp(png_jmpbuf(png_))) fail(path_, "PNG encode error");
    png_init_io(png_, file_.get());
    png_set_IHDR(png_, info_, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png_, info_);
    png_write_image(png_, const_cast<png_bytepp>(rows.data()));
    png_write_end(png_, nullptr);
  }

 private:
  std::filesystem::path path_;
  FilePtr file_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

void check_nonempty(Index w, Index h, const std::filesystem::path& path) {
  if (w <= 0 || h <= 0) fail(path, "refusing to write an empty image");
}

}  // namespace

LabelGrid read_png_grey8(const std::filesystem::path& path) {
  return PngReader(path).read_grey8();
}

void write_png_grey8(const std::filesystem::path& path, const LabelGrid& grid) {
  check_nonempty(grid.cols(), grid.rows(), path);
  std::vector<png_bytep> rows(grid.rows());
  for (Index y = 0; y < grid.rows(); ++y)
    rows[y] = const_cast<png_bytep>(grid.data() + y * grid.cols());
  PngWriter(path).write(grid.cols(), grid.rows(), 8, PNG_COLOR_TYPE_GRAY, rows);
}

RgbImage read_png_rgb8(const std::filesystem::path& path) {
  return PngReader(path).read_rgb8();
}

void write_png_rgb8(const std::filesystem::path& path, const RgbImage& img) {
  check_nonempty(img.width, img.height, path);
  if (img.data.size() != static_cast<std::size_t>(3 * img.width * img.height))
    fail(path, "RGB buffer size does not match dimensions");
  std::vector<png_bytep> rows(img.height);
  for (Index y = 0; y < img.height; ++y)
    rows[y] = const_cast<png_bytep>(img.data.data() + 3 * y * img.width);
  PngWriter(path).write(img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

MaskGrid read_png_mask(const std::filesystem::path& path) {
  LabelGrid grid = read_png_grey8(path);
  // 1-bit files expand to 0/255; normalize anything nonzero to 1.
  return (grid != 0).cast<std::uint8_t>();
}

void write_png_mask(const std::filesystem::path& path, const MaskGrid& mask) {
  check_nonempty(mask.cols(), mask.rows(), path);
  const Index h = mask.rows(), w = mask.cols();
  const Index stride = (w + 7) / 8;
  std::vector<std::uint8_t> packed(static_cast<std::size_t>(stride * h), 0);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      if (mask(y, x)) packed[y * stride + x / 8] |= std::uint8_t(0x80u >> (x % 8));
  std::vector<png_bytep> rows(h);
  for (Index y = 0; y < h; ++y) rows[y] = packed.data() + y * stride;
  PngWriter(path).write(w, h, 1, PNG_COLOR_TYPE_GRAY, rows);
}

}  // namespace segrobust
