#pragma once

#include <array>

#include "pai/rng.hpp"
#include "pai/types.hpp"

// Shared fixtures: the 13-point density dataset used across the distribution
// tests, and small generators for synthetic clustering data.

namespace testutil {

inline constexpr std::array<double, 13> kDensityX = {
    0.1, 0.4, 0.5, 0.8, 1.5, 2.1, 3.0, 3.1, 3.5, 4.6, 5.9, 6.0, 6.4};
inline constexpr std::array<double, 13> kDensityP = {
    0.072, 0.076, 0.08, 0.073, 0.036, 0.014, 0.02,
    0.012, 0.016, 0.02,  0.022, 0.03,  0.024};

inline pai::WeightedPointSet density_points() {
  pai::MatrixXd pts(13, 1);
  pai::VectorXd w(13);
  for (int i = 0; i < 13; ++i) {
    pts(i, 0) = kDensityX[static_cast<std::size_t>(i)];
    w[i] = kDensityP[static_cast<std::size_t>(i)];
  }
  return pai::WeightedPointSet(pts, w);
}

inline pai::AffineLayer scalar_affine(double a, double b) {
  pai::MatrixXd w(1, 1);
  w(0, 0) = a;
  pai::VectorXd bias(1);
  bias[0] = b;
  return pai::AffineLayer(w, bias);
}

/// The 2x2 shear used by several worked examples.
inline pai::AffineLayer shear_affine() {
  pai::MatrixXd w(2, 2);
  w << 2.0, -1.0, 0.0, 1.0;
  return pai::AffineLayer(w, pai::VectorXd::Zero(2));
}

/// Two equal-mass gaussian blobs in `dim` dimensions, n points per blob.
inline pai::WeightedPointSet two_blobs(int n_per_blob, int dim, double sep,
                                       double spread, std::uint64_t seed) {
  pai::Rng rng(seed);
  const int n = 2 * n_per_blob;
  pai::MatrixXd pts(n, dim);
  for (int i = 0; i < n; ++i) {
    const double offset = i < n_per_blob ? -sep / 2 : sep / 2;
    for (int j = 0; j < dim; ++j)
      pts(i, j) = (j == 0 ? offset : 0.0) + spread * rng.normal();
  }
  return pai::WeightedPointSet(
      pts, pai::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

/// Deterministic uniform cloud in [-1,1]^dim.
inline pai::WeightedPointSet random_cloud(int n, int dim, std::uint64_t seed) {
  pai::Rng rng(seed);
  pai::MatrixXd pts(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) pts(i, j) = rng.uniform_pm1();
  pai::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 + rng.uniform01();
  return pai::WeightedPointSet(pts, w);
}

}  // namespace testutil
