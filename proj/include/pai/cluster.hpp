#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pai/types.hpp"

// Clusters-approximation abstract domains: K-means centroids and Gaussian
// mixture components carrying aggregated probability masses, with affine
// pushforward transformers.

namespace pai::cluster {

enum class InitKind { random_points, kmeans_plus_plus, given };

std::string to_string(InitKind kind);
InitKind init_from_string(const std::string& name);

struct EmConfig {
  int k = 1;
  int max_iters = 300;  // 0 means assign/score once without updates
  double tol = 1e-8;
  std::uint64_t seed = 0;
  InitKind init = InitKind::random_points;
  MatrixXd given_centroids;  // k x dim, used when init == given
  bool weighted_means = false;  // weigh points in the centroid update step
};

struct CentroidAbstraction {
  MatrixXd centroids;  // k x dim
  VectorXd masses;     // per-cluster sums of point weights
  std::vector<std::int32_t> assignments;   // empty when unknown
  std::vector<double> objective_history;   // per-iteration Lloyd objective
};

struct GmmComponent {
  double weight = 1.0;   // mixture weight, sums to 1 across components
  VectorXd mean;
  MatrixXd covariance;   // symmetric positive definite (regularized)
};

struct GmmAbstraction {
  std::vector<GmmComponent> components;
  VectorXd masses;             // sum_i r_ik p_i
  MatrixXd responsibilities;   // n x k; empty when unknown
  std::vector<double> loglik_history;  // per-iteration data log-likelihood
};

/// Lloyd iteration: nearest-centroid assignment (squared Euclidean, ties to
/// the lowest index) alternating with mean updates, until labels stop
/// changing, centroids move less than tol, or max_iters is hit. Centroid
/// means are unweighted unless cfg.weighted_means; masses always aggregate
/// the point weights of each cluster. Empty clusters are re-seeded to the
/// point farthest from its assigned centroid.
CentroidAbstraction kmeans_fit(const WeightedPointSet& data,
                               const EmConfig& cfg);

/// Sum over points of squared distance to the assigned centroid.
double kmeans_objective(const WeightedPointSet& data,
                        const CentroidAbstraction& abst);

/// Maps every centroid through the network; masses are carried over
/// untouched. Assignments survive (cluster membership is not recomputed).
CentroidAbstraction transform_centroids(const CentroidAbstraction& abst,
                                        const Network& net);

/// EM for a K-component Gaussian mixture, initialized from a K-means run
/// (or from cfg.given_centroids as initial means). Covariances carry a
/// +1e-6 I regularization. Stops when the log-likelihood improves by less
/// than tol or after max_iters iterations.
GmmAbstraction gmm_fit(const WeightedPointSet& data, const EmConfig& cfg);

/// Affine pushforward per component: mean -> A mu + b, covariance -> A S A^T;
/// mixture weights and masses are unchanged. Activation layers are rejected.
GmmAbstraction transform_gmm(const GmmAbstraction& abst,
                             const AffineLayer& layer);

/// Layer dispatch; activation layers raise UnsupportedLayerError.
GmmAbstraction transform_gmm(const GmmAbstraction& abst, const Layer& layer);

/// Mass of the abstraction inside the closed box: sum of member-centroid
/// masses, or the quadrature mass of each Gaussian weighted by its cluster
/// mass.
double region_mass_abstract(const CentroidAbstraction& abst, const Region& r);
double region_mass_abstract(const GmmAbstraction& abst, const Region& r);

}  // namespace pai::cluster
