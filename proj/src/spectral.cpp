#include "segrobust/spectral.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace segrobust {

namespace {

using ComplexGrid =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

/// 2-D DFT by row passes followed by column passes.
ComplexGrid dft2(const ImageGrid<double>& grey) {
  const Index h = grey.rows(), w = grey.cols();
  Eigen::FFT<double> fft;
  ComplexGrid freq(h, w);

  std::vector<std::complex<double>> line_in, line_out;
  for (Index y = 0; y < h; ++y) {
    line_in.assign(w, {});
    for (Index x = 0; x < w; ++x) line_in[x] = grey(y, x);
    line_out.assign(w, {});
    fft.fwd(line_out, line_in);
    for (Index x = 0; x < w; ++x) freq(y, x) = line_out[x];
  }
  for (Index x = 0; x < w; ++x) {
    line_in.assign(h, {});
    for (Index y = 0; y < h; ++y) line_in[y] = freq(y, x);
    line_out.assign(h, {});
    fft.fwd(line_out, line_in);
    for (Index y = 0; y < h; ++y) freq(y, x) = line_out[y];
  }
  return freq;
}

}  // namespace

Spectrum spectrum(const ImageGrid<double>& grey) {
  const Index h = grey.rows(), w = grey.cols();
  if (h < 2 || w < 2)
    throw std::invalid_argument("spectrum needs width and height >= 2");
  const ComplexGrid freq = dft2(grey);
  // Shift DC to (h/2, w/2), then log-compress the magnitude.
  Spectrum out(h, w);
  const Index cy = h / 2, cx = w / 2;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      out((y + cy) % h, (x + cx) % w) = std::log1p(std::abs(freq(y, x)));
  return out;
}

Spectrum spectrum(const RgbImage& img) { return spectrum(luma(img)); }

ImageGrid<double> radial_frequency(Index rows, Index cols) {
  const Index cy = rows / 2, cx = cols / 2;
  // The farthest corner from the centered DC bin defines radius 1.
  const double max_dy = std::max<double>(cy, rows - 1 - cy);
  const double max_dx = std::max<double>(cx, cols - 1 - cx);
  const double corner = std::hypot(max_dy, max_dx);
  ImageGrid<double> r(rows, cols);
  for (Index y = 0; y < rows; ++y)
    for (Index x = 0; x < cols; ++x)
      r(y, x) = std::hypot(double(y - cy), double(x - cx)) / corner;
  return r;
}

double filter_cutoff(int filter_rate) {
  switch (filter_rate) {
    case 0: return 0.0;
    case 1: return 0.25;
    case 2: return 0.5;
  }
  throw std::invalid_argument("filter_rate must be 0, 1 or 2");
}

double spectral_distance(const Spectrum& a, const Spectrum& b,
                         int filter_rate) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("spectral_distance: dimension mismatch");
  const double cutoff = filter_cutoff(filter_rate);
  const ImageGrid<double> r = radial_frequency(a.rows(), a.cols());
  double sum = 0.0;
  std::int64_t retained = 0;
  for (Index y = 0; y < a.rows(); ++y) {
    for (Index x = 0; x < a.cols(); ++x) {
      if (r(y, x) < cutoff) continue;
      sum += std::abs(a(y, x) - b(y, x));
      ++retained;
    }
  }
  if (retained == 0)
    throw std::runtime_error("high-pass filter retained no frequency bins");
  return sum / double(retained);
}

double spectral_distance(const std::vector<RgbImage>& set_a,
                         const std::vector<RgbImage>& set_b, int filter_rate) {
  if (set_a.size() != set_b.size())
    throw std::invalid_argument("spectral_distance: paired lists differ in length");
  if (set_a.empty())
    throw std::invalid_argument("spectral_distance: empty image lists");
  double sum = 0.0;
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    if (set_a[i].width != set_b[i].width || set_a[i].height != set_b[i].height)
      throw std::invalid_argument("spectral_distance: pair " +
                                  std::to_string(i) + " has mismatched sizes");
    sum += spectral_distance(spectrum(set_a[i]), spectrum(set_b[i]),
                             filter_rate);
  }
  return sum / double(set_a.size());
}

}  // namespace segrobust
