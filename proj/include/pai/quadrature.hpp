#pragma once

#include <functional>

#include "pai/types.hpp"

// Deterministic quadrature helpers shared by the region-mass queries.

namespace pai::quad {

/// Default node count for one-dimensional density integrals.
inline constexpr int kSimpsonNodes = 1025;

/// Composite Simpson rule over [lo, hi]; `nodes` must be odd and >= 3.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               int nodes = kSimpsonNodes);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights);

/// Integral of the normal density N(mean, cov) over the closed box.
/// Exactly diagonal covariances use the erf product; full covariances use
/// tensorized Gauss-Legendre quadrature (64 nodes per axis up to 2 dims,
/// 24 at 3 dims, 8 beyond).
double normal_box_mass(const VectorXd& mean, const MatrixXd& cov,
                       const Region& region);

}  // namespace pai::quad
