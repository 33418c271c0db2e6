#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

namespace segrobust {

/// Gaussian summary (sample mean, unbiased covariance) of an embedding set.
struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::int64_t count = 0;

  Eigen::Index dim() const { return mean.size(); }
};

/// Rows are samples. Needs count >= 2; the covariance is symmetrized.
FeatureStats fit_feature_stats(const Eigen::MatrixXd& features);

/// Reads the "FVEC" binary format: magic, u32 count, u32 dim, then
/// count x dim float32 row-major, little-endian.
Eigen::MatrixXd read_features(const std::filesystem::path& path);

void write_features(const std::filesystem::path& path,
                    const Eigen::MatrixXd& features);

/// Squared Wasserstein-2 distance between the two Gaussian summaries:
///   ||mu_a - mu_b||^2 + tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2)
/// Matrix square roots go through symmetric eigendecompositions; eigenvalues
/// in [-1e-6, 0) are clamped to zero and anything lower is rejected as
/// indefinite.
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

}  // namespace segrobust
