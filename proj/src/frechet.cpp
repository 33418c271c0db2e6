#include "segrobust/frechet.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace segrobust {

namespace {

constexpr char kMagic[4] = {'F', 'V', 'E', 'C'};
constexpr double kNegativeEigenvalueLimit = -1e-6;

/// Symmetric PSD square root; eigenvalues in [limit, 0) are clamped to zero,
/// anything below `limit` reports indefiniteness.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
  const Eigen::MatrixXd sym = (m + m.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(std::string("eigendecomposition failed for ") +
                             what);
  Eigen::VectorXd evals = solver.eigenvalues();
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] < kNegativeEigenvalueLimit)
      throw std::runtime_error(std::string(what) +
                               " is indefinite: eigenvalue " +
                               std::to_string(evals[i]));
    evals[i] = std::sqrt(std::max(evals[i], 0.0));
  }
  return solver.eigenvectors() * evals.asDiagonal() *
         solver.eigenvectors().transpose();
}

}  // namespace

FeatureStats fit_feature_stats(const Eigen::MatrixXd& features) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 2)
    throw std::invalid_argument("fit_feature_stats needs at least 2 samples");
  FeatureStats stats;
  stats.count = n;
  stats.mean = features.colwise().mean();
  const Eigen::MatrixXd centered = features.rowwise() - stats.mean.transpose();
  stats.covariance = centered.transpose() * centered / double(n - 1);
  stats.covariance = (stats.covariance + stats.covariance.transpose()) / 2.0;
  if (d == 0) throw std::invalid_argument("fit_feature_stats: zero dimension");
  return stats;
}

Eigen::MatrixXd read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open feature file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("bad FVEC magic in " + path.string());
  auto read_u32 = [&in]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
           std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
  };
  const std::uint32_t count = read_u32();
  const std::uint32_t dim = read_u32();
  if (!in || count == 0 || dim == 0)
    throw std::runtime_error("bad FVEC header in " + path.string());
  std::vector<float> buf(std::size_t(count) * dim);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in)
    throw std::runtime_error("truncated FVEC payload in " + path.string());
  Eigen::MatrixXd features(count, dim);
  for (std::uint32_t r = 0; r < count; ++r)
    for (std::uint32_t c = 0; c < dim; ++c)
      features(r, c) = buf[std::size_t(r) * dim + c];
  return features;
}

void write_features(const std::filesystem::path& path,
                    const Eigen::MatrixXd& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write feature file: " + path.string());
  out.write(kMagic, 4);
  auto write_u32 = [&out](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  write_u32(static_cast<std::uint32_t>(features.rows()));
  write_u32(static_cast<std::uint32_t>(features.cols()));
  std::vector<float> buf(std::size_t(features.rows()) * features.cols());
  for (Eigen::Index r = 0; r < features.rows(); ++r)
    for (Eigen::Index c = 0; c < features.cols(); ++c)
      buf[std::size_t(r) * features.cols() + c] = float(features(r, c));
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write: " + path.string());
}

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("frechet_distance: dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  const Eigen::MatrixXd sqrt_a = psd_sqrt(a.covariance, "covariance A");
  psd_sqrt(b.covariance, "covariance B");  // PSD check only
  const Eigen::MatrixXd inner = sqrt_a * b.covariance * sqrt_a;
  const Eigen::MatrixXd cross = psd_sqrt(inner, "cross term");

  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double trace_term =
      a.covariance.trace() + b.covariance.trace() - 2.0 * cross.trace();
  return std::max(0.0, mean_term + trace_term);
}

}  // namespace segrobust
