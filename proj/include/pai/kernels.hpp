#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pai/types.hpp"

// Data-parallel inner loops, OpenMP-backed. Every reduction accumulates into
// fixed-size chunks that are combined in index order, so results do not
// depend on the thread count or schedule; naive serial counterparts live in
// pai::kernels::ref and are used by the tests and the benchmark.

namespace pai::kernels {

/// Fixed reduction chunk width (elements per partial sum).
inline constexpr Eigen::Index kChunk = 4096;

/// 0 restores the OpenMP default.
void set_thread_count(int n);
int thread_count();

/// Deterministic sum of v (chunked, order-independent of threads).
double chunked_sum(const VectorXd& v);

/// out.row(i) = W * pts.row(i)^T + b for every i.
void batch_affine(const MatrixXd& weight, const VectorXd& bias,
                  const MatrixXd& pts, MatrixXd& out);

/// Elementwise activation over all rows, in place.
void batch_activation(ActivationKind kind, MatrixXd& pts);

/// Index of the nearest centroid per point (squared Euclidean distance,
/// ties to the lowest centroid index).
std::vector<std::int32_t> assign_nearest(const MatrixXd& pts,
                                         const MatrixXd& centroids);

struct ClusterMoments {
  MatrixXd coord_sums;   // k x dim, plain or weight-scaled point sums
  VectorXd counts;       // k, member counts
  VectorXd weight_sums;  // k, sum of point weights per cluster
};

/// Per-cluster accumulations for a labeling. When `weighted` is set the
/// coordinate sums are weighted by the point weights (for weighted means).
ClusterMoments cluster_moments(const MatrixXd& pts, const VectorXd& weights,
                               const std::vector<std::int32_t>& labels, int k,
                               bool weighted);

/// Sum of weights of points inside the closed box.
double region_weight_sum(const MatrixXd& pts, const VectorXd& weights,
                         const Region& region);

/// Sum over points of squared distance to the assigned centroid.
double assignment_sq_error(const MatrixXd& pts, const MatrixXd& centroids,
                           const std::vector<std::int32_t>& labels);

// ---------------------------------------------------------------------------
// Exhaustive RBF center search.
//
// Combinations of `n_centers` out of `m` candidate indices are enumerated in
// lexicographic order; candidate r is recovered from its rank by combinatorial
// unranking so iterations are independent. The reduction key is
// (rms, lexicographic rank): a strict total order, so the parallel winner is
// always the sequential one.
// ---------------------------------------------------------------------------

struct RbfSearchResult {
  double rms = 0.0;
  std::uint64_t rank = 0;
  std::vector<int> combo;  // ascending candidate indices
  VectorXd coefficients;
  std::uint64_t combos_total = 0;    // enumerated combinations
  std::uint64_t combos_skipped = 0;  // singular systems
};

/// C(n,k) with saturation at 2^63-1.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Writes the `rank`-th (lexicographic) ascending k-combination of {0..n-1}.
void unrank_combination(std::uint64_t rank, int n, int k, std::vector<int>& out);

/// Solves the square interpolation system phi(|c_k - c_i|) a = y at the given
/// center values; returns nullopt when the system is numerically singular.
/// Phi: double distance -> double.
template <class Phi>
std::optional<VectorXd> solve_interpolation_system(const VectorXd& centers,
                                                   const VectorXd& values,
                                                   Phi&& phi);

/// Best combination over all C(m, n_centers) subsets of xs, scored by the
/// root-mean-square misfit of the interpolant against all (xs, ys) pairs.
/// Returns nullopt when every combination is singular.
template <class Phi>
std::optional<RbfSearchResult> rbf_search(const VectorXd& xs, const VectorXd& ys,
                                          int n_centers, Phi&& phi);

// ---------------------------------------------------------------------------
// Gaussian-mixture E-step / M-step kernels.
// ---------------------------------------------------------------------------

/// One mixture component prepared for density evaluation.
struct PreparedComponent {
  double log_weight = 0.0;
  VectorXd mean;
  Eigen::LLT<MatrixXd> chol;  // of the covariance
  double log_norm = 0.0;      // -(D log(2 pi) + log det) / 2
};

PreparedComponent prepare_component(double weight, const VectorXd& mean,
                                    const MatrixXd& covariance);

/// Fills responsibilities (rows sum to 1) and returns the data log-likelihood
/// sum_i log sum_k w_k N(x_i | mu_k, Sigma_k), accumulated chunk-wise.
double gmm_estep(const MatrixXd& pts,
                 const std::vector<PreparedComponent>& comps, MatrixXd& resp);

struct GmmMoments {
  VectorXd resp_sums;             // m_k
  MatrixXd mean_sums;             // k x dim, sum_i r_ik x_i
  std::vector<MatrixXd> scatter;  // k of dim x dim, sum_i r_ik d d^T
  VectorXd mass_sums;             // k, sum_i r_ik p_i
};

/// First-moment pass (resp_sums, mean_sums, mass_sums). Scatter is left empty.
GmmMoments gmm_moments(const MatrixXd& pts, const MatrixXd& resp,
                       const VectorXd& weights);

/// Second-moment pass around the given means.
void gmm_scatter(const MatrixXd& pts, const MatrixXd& resp,
                 const MatrixXd& means, std::vector<MatrixXd>& scatter);

// ---------------------------------------------------------------------------
// Serial reference implementations (tests, benchmark).
// ---------------------------------------------------------------------------

namespace ref {

double sum(const VectorXd& v);
void batch_affine(const MatrixXd& weight, const VectorXd& bias,
                  const MatrixXd& pts, MatrixXd& out);
std::vector<std::int32_t> assign_nearest(const MatrixXd& pts,
                                         const MatrixXd& centroids);
ClusterMoments cluster_moments(const MatrixXd& pts, const VectorXd& weights,
                               const std::vector<std::int32_t>& labels, int k,
                               bool weighted);
double region_weight_sum(const MatrixXd& pts, const VectorXd& weights,
                         const Region& region);

template <class Phi>
std::optional<RbfSearchResult> rbf_search(const VectorXd& xs, const VectorXd& ys,
                                          int n_centers, Phi&& phi);

double gmm_estep(const MatrixXd& pts,
                 const std::vector<PreparedComponent>& comps, MatrixXd& resp);

}  // namespace ref

}  // namespace pai::kernels

#include "pai/kernels_impl.hpp"
