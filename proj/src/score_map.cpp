#include "segrobust/score_map.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace segrobust {

namespace {

constexpr char kMagic[4] = {'S', 'M', 'A', 'P'};
constexpr float kSumTolerance = 1e-4f;

std::uint32_t read_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
         std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

void write_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

// Probability maps (n_classes >= 2) must be per-pixel distributions;
// single-channel maps carry raw anomaly scores and are exempt.
void check_sums(const ScoreMap& m, const std::filesystem::path& path) {
  if (m.n_classes < 2) return;
  for (Index y = 0; y < m.height; ++y) {
    for (Index x = 0; x < m.width; ++x) {
      const float* p = m.pixel(y, x);
      float sum = 0.f;
      for (int c = 0; c < m.n_classes; ++c) {
        if (!std::isfinite(p[c]))
          throw std::runtime_error("non-finite score at (" +
                                   std::to_string(x) + "," + std::to_string(y) +
                                   ") in " + path.string());
        sum += p[c];
      }
      if (std::abs(sum - 1.f) > kSumTolerance)
        throw std::runtime_error("score vector at (" + std::to_string(x) + "," +
                                 std::to_string(y) + ") sums to " +
                                 std::to_string(sum) + " in " + path.string());
    }
  }
}

}  // namespace

ScoreMap read_score_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open score map: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("bad SMAP magic in " + path.string());

  ScoreMap m;
  m.height = read_u32le(in);
  m.width = read_u32le(in);
  m.n_classes = static_cast<int>(read_u32le(in));
  if (!in || m.height <= 0 || m.width <= 0 || m.n_classes <= 0)
    throw std::runtime_error("bad SMAP header in " + path.string());

  const std::size_t n =
      static_cast<std::size_t>(m.height) * m.width * m.n_classes;
  m.data.resize(n);
  in.read(reinterpret_cast<char*>(m.data.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (!in || in.gcount() != static_cast<std::streamsize>(n * sizeof(float)))
    throw std::runtime_error("truncated SMAP payload in " + path.string());
  check_sums(m, path);
  return m;
}

void write_score_map(const std::filesystem::path& path, const ScoreMap& map) {
  if (map.data.size() !=
      static_cast<std::size_t>(map.height) * map.width * map.n_classes)
    throw std::invalid_argument("score map buffer does not match header");
  check_sums(map, path);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write score map: " + path.string());
  out.write(kMagic, 4);
  write_u32le(out, static_cast<std::uint32_t>(map.height));
  write_u32le(out, static_cast<std::uint32_t>(map.width));
  write_u32le(out, static_cast<std::uint32_t>(map.n_classes));
  out.write(reinterpret_cast<const char*>(map.data.data()),
            static_cast<std::streamsize>(map.data.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace segrobust
