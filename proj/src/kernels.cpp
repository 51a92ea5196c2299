#include "pai/kernels.hpp"

#include <omp.h>

#include <cmath>

namespace pai::kernels {

namespace {

Eigen::Index chunk_count(Eigen::Index n) { return (n + kChunk - 1) / kChunk; }

int& default_threads() {
  static int def = omp_get_max_threads();
  return def;
}

}  // namespace

void set_thread_count(int n) {
  omp_set_num_threads(n > 0 ? n : default_threads());
}

int thread_count() { return omp_get_max_threads(); }

double chunked_sum(const VectorXd& v) {
  const Eigen::Index n = v.size();
  const Eigen::Index nc = chunk_count(n);
  std::vector<double> partial(static_cast<std::size_t>(nc), 0.0);
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - b);
    double s = 0.0;
    for (Eigen::Index i = 0; i < len; ++i) s += v[b + i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

void batch_affine(const MatrixXd& weight, const VectorXd& bias,
                  const MatrixXd& pts, MatrixXd& out) {
  if (pts.cols() != weight.cols())
    throw DimensionError("points have dimension " + std::to_string(pts.cols()) +
                         ", affine layer expects " +
                         std::to_string(weight.cols()));
  const Eigen::Index n = pts.rows();
  out.resize(n, weight.rows());
  const MatrixXd wt = weight.transpose();
  const Eigen::Index nc = chunk_count(n);
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - b);
    out.middleRows(b, len).noalias() = pts.middleRows(b, len) * wt;
    out.middleRows(b, len).rowwise() += bias.transpose();
  }
}

void batch_activation(ActivationKind kind, MatrixXd& pts) {
  if (kind == ActivationKind::identity) return;
  const Eigen::Index n = pts.size();
  double* data = pts.data();
  const Eigen::Index nc = chunk_count(n);
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - b);
    for (Eigen::Index i = 0; i < len; ++i)
      data[b + i] = apply_activation(kind, data[b + i]);
  }
}

std::vector<std::int32_t> assign_nearest(const MatrixXd& pts,
                                         const MatrixXd& centroids) {
  if (centroids.rows() == 0)
    throw DimensionError("cannot assign points to zero centroids");
  if (pts.cols() != centroids.cols())
    throw DimensionError("point dimension " + std::to_string(pts.cols()) +
                         " does not match centroid dimension " +
                         std::to_string(centroids.cols()));
  const Eigen::Index n = pts.rows();
  const Eigen::Index k = centroids.rows();
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n), 0);
#pragma omp parallel for
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = (pts.row(i) - centroids.row(0)).squaredNorm();
    std::int32_t arg = 0;
    for (Eigen::Index j = 1; j < k; ++j) {
      const double d = (pts.row(i) - centroids.row(j)).squaredNorm();
      if (d < best) {  // strict: ties stay with the lowest index
        best = d;
        arg = static_cast<std::int32_t>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
  }
  return labels;
}

ClusterMoments cluster_moments(const MatrixXd& pts, const VectorXd& weights,
                               const std::vector<std::int32_t>& labels, int k,
                               bool weighted) {
  const Eigen::Index n = pts.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw DimensionError("label count does not match point count");
  if (weights.size() != n)
    throw DimensionError("weight count does not match point count");
  for (std::int32_t label : labels)
    if (label < 0 || label >= k)
      throw IndexError("cluster label " + std::to_string(label) +
                       " out of range for k=" + std::to_string(k));

  const Eigen::Index nc = chunk_count(n);
  std::vector<ClusterMoments> partial(static_cast<std::size_t>(nc));
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    auto& p = partial[static_cast<std::size_t>(c)];
    p.coord_sums = MatrixXd::Zero(k, pts.cols());
    p.counts = VectorXd::Zero(k);
    p.weight_sums = VectorXd::Zero(k);
    const Eigen::Index b = c * kChunk;
    const Eigen::Index end = std::min(n, b + kChunk);
    for (Eigen::Index i = b; i < end; ++i) {
      const std::int32_t label = labels[static_cast<std::size_t>(i)];
      p.coord_sums.row(label) +=
          weighted ? (weights[i] * pts.row(i)).eval() : pts.row(i).eval();
      p.counts[label] += 1.0;
      p.weight_sums[label] += weights[i];
    }
  }

  ClusterMoments total;
  total.coord_sums = MatrixXd::Zero(k, pts.cols());
  total.counts = VectorXd::Zero(k);
  total.weight_sums = VectorXd::Zero(k);
  for (const auto& p : partial) {
    total.coord_sums += p.coord_sums;
    total.counts += p.counts;
    total.weight_sums += p.weight_sums;
  }
  return total;
}

double region_weight_sum(const MatrixXd& pts, const VectorXd& weights,
                         const Region& region) {
  if (pts.cols() != region.dim())
    throw DimensionError("point dimension does not match region dimension");
  if (weights.size() != pts.rows())
    throw DimensionError("weight count does not match point count");
  const Eigen::Index n = pts.rows();
  const Eigen::Index nc = chunk_count(n);
  std::vector<double> partial(static_cast<std::size_t>(nc), 0.0);
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b = c * kChunk;
    const Eigen::Index end = std::min(n, b + kChunk);
    double s = 0.0;
    for (Eigen::Index i = b; i < end; ++i) {
      bool inside = true;
      for (Eigen::Index d = 0; d < pts.cols(); ++d) {
        if (pts(i, d) < region.lower[d] || pts(i, d) > region.upper[d]) {
          inside = false;
          break;
        }
      }
      if (inside) s += weights[i];
    }
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double assignment_sq_error(const MatrixXd& pts, const MatrixXd& centroids,
                           const std::vector<std::int32_t>& labels) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index nc = chunk_count(n);
  std::vector<double> partial(static_cast<std::size_t>(nc), 0.0);
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b = c * kChunk;
    const Eigen::Index end = std::min(n, b + kChunk);
    double s = 0.0;
    for (Eigen::Index i = b; i < end; ++i)
      s += (pts.row(i) - centroids.row(labels[static_cast<std::size_t>(i)]))
               .squaredNorm();
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  constexpr std::uint64_t kSat = (1ULL << 63) - 1;
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;  // exact: C(n-k+i, i) is an integer
    if (acc > kSat) return kSat;
  }
  return static_cast<std::uint64_t>(acc);
}

void unrank_combination(std::uint64_t rank, int n, int k,
                        std::vector<int>& out) {
  out.resize(static_cast<std::size_t>(k));
  int next = 0;
  for (int i = 0; i < k; ++i) {
    int c = next;
    while (true) {
      const std::uint64_t below =
          binomial(static_cast<std::uint64_t>(n - 1 - c),
                   static_cast<std::uint64_t>(k - 1 - i));
      if (rank < below) break;
      rank -= below;
      ++c;
    }
    out[static_cast<std::size_t>(i)] = c;
    next = c + 1;
  }
}

PreparedComponent prepare_component(double weight, const VectorXd& mean,
                                    const MatrixXd& covariance) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
    throw DimensionError("covariance shape does not match mean dimension");
  if (!(weight > 0.0))
    throw DegenerateDataError("mixture component weight must be positive");
  PreparedComponent comp;
  comp.log_weight = std::log(weight);
  comp.mean = mean;
  comp.chol.compute(covariance);
  if (comp.chol.info() != Eigen::Success)
    throw DegenerateDataError("covariance matrix is not positive definite");
  const auto& l = comp.chol.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  const double d = static_cast<double>(mean.size());
  comp.log_norm = -0.5 * (d * std::log(2.0 * 3.14159265358979323846) + log_det);
  return comp;
}

namespace {

/// Responsibilities and log-density for one point; shared by both E-steps.
double estep_point(const MatrixXd& pts, Eigen::Index i,
                   const std::vector<PreparedComponent>& comps,
                   MatrixXd& resp) {
  const Eigen::Index k = static_cast<Eigen::Index>(comps.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& comp = comps[static_cast<std::size_t>(j)];
    const VectorXd diff = pts.row(i).transpose() - comp.mean;
    const double q = comp.chol.matrixL().solve(diff).squaredNorm();
    const double lg = comp.log_weight + comp.log_norm - 0.5 * q;
    resp(i, j) = lg;  // stash logs, normalized below
    if (lg > max_log) max_log = lg;
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) sum += std::exp(resp(i, j) - max_log);
  const double lse = max_log + std::log(sum);
  for (Eigen::Index j = 0; j < k; ++j) resp(i, j) = std::exp(resp(i, j) - lse);
  return lse;
}

}  // namespace

double gmm_estep(const MatrixXd& pts,
                 const std::vector<PreparedComponent>& comps, MatrixXd& resp) {
  const Eigen::Index n = pts.rows();
  resp.resize(n, static_cast<Eigen::Index>(comps.size()));
  const Eigen::Index nc = chunk_count(n);
  std::vector<double> partial(static_cast<std::size_t>(nc), 0.0);
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b = c * kChunk;
    const Eigen::Index end = std::min(n, b + kChunk);
    double ll = 0.0;
    for (Eigen::Index i = b; i < end; ++i) ll += estep_point(pts, i, comps, resp);
    partial[static_cast<std::size_t>(c)] = ll;
  }
  double total = 0.0;
  for (double ll : partial) total += ll;
  return total;
}

GmmMoments gmm_moments(const MatrixXd& pts, const MatrixXd& resp,
                       const VectorXd& weights) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index k = resp.cols();
  const Eigen::Index dim = pts.cols();
  const Eigen::Index nc = chunk_count(n);
  struct Partial {
    VectorXd resp_sums;
    MatrixXd mean_sums;
    VectorXd mass_sums;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(nc));
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    auto& p = partial[static_cast<std::size_t>(c)];
    p.resp_sums = VectorXd::Zero(k);
    p.mean_sums = MatrixXd::Zero(k, dim);
    p.mass_sums = VectorXd::Zero(k);
    const Eigen::Index b = c * kChunk;
    const Eigen::Index end = std::min(n, b + kChunk);
    for (Eigen::Index i = b; i < end; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const double r = resp(i, j);
        p.resp_sums[j] += r;
        p.mean_sums.row(j) += r * pts.row(i);
        p.mass_sums[j] += r * weights[i];
      }
    }
  }
  GmmMoments total;
  total.resp_sums = VectorXd::Zero(k);
  total.mean_sums = MatrixXd::Zero(k, dim);
  total.mass_sums = VectorXd::Zero(k);
  for (const auto& p : partial) {
    total.resp_sums += p.resp_sums;
    total.mean_sums += p.mean_sums;
    total.mass_sums += p.mass_sums;
  }
  return total;
}

void gmm_scatter(const MatrixXd& pts, const MatrixXd& resp,
                 const MatrixXd& means, std::vector<MatrixXd>& scatter) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index k = resp.cols();
  const Eigen::Index dim = pts.cols();
  const Eigen::Index nc = chunk_count(n);
  std::vector<std::vector<MatrixXd>> partial(static_cast<std::size_t>(nc));
#pragma omp parallel for
  for (Eigen::Index c = 0; c < nc; ++c) {
    auto& p = partial[static_cast<std::size_t>(c)];
    p.assign(static_cast<std::size_t>(k), MatrixXd::Zero(dim, dim));
    const Eigen::Index b = c * kChunk;
    const Eigen::Index end = std::min(n, b + kChunk);
    for (Eigen::Index i = b; i < end; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const VectorXd diff = pts.row(i).transpose() - means.row(j).transpose();
        p[static_cast<std::size_t>(j)].noalias() +=
            resp(i, j) * (diff * diff.transpose());
      }
    }
  }
  scatter.assign(static_cast<std::size_t>(k), MatrixXd::Zero(dim, dim));
  for (const auto& p : partial)
    for (Eigen::Index j = 0; j < k; ++j)
      scatter[static_cast<std::size_t>(j)] += p[static_cast<std::size_t>(j)];
}

namespace ref {

double sum(const VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

void batch_affine(const MatrixXd& weight, const VectorXd& bias,
                  const MatrixXd& pts, MatrixXd& out) {
  out.resize(pts.rows(), weight.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    out.row(i) = (weight * pts.row(i).transpose() + bias).transpose();
}

std::vector<std::int32_t> assign_nearest(const MatrixXd& pts,
                                         const MatrixXd& centroids) {
  std::vector<std::int32_t> labels(static_cast<std::size_t>(pts.rows()), 0);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    double best = (pts.row(i) - centroids.row(0)).squaredNorm();
    std::int32_t arg = 0;
    for (Eigen::Index j = 1; j < centroids.rows(); ++j) {
      const double d = (pts.row(i) - centroids.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<std::int32_t>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
  }
  return labels;
}

ClusterMoments cluster_moments(const MatrixXd& pts, const VectorXd& weights,
                               const std::vector<std::int32_t>& labels, int k,
                               bool weighted) {
  ClusterMoments m;
  m.coord_sums = MatrixXd::Zero(k, pts.cols());
  m.counts = VectorXd::Zero(k);
  m.weight_sums = VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const std::int32_t label = labels[static_cast<std::size_t>(i)];
    m.coord_sums.row(label) +=
        weighted ? (weights[i] * pts.row(i)).eval() : pts.row(i).eval();
    m.counts[label] += 1.0;
    m.weight_sums[label] += weights[i];
  }
  return m;
}

double region_weight_sum(const MatrixXd& pts, const VectorXd& weights,
                         const Region& region) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    bool inside = true;
    for (Eigen::Index d = 0; d < pts.cols(); ++d) {
      if (pts(i, d) < region.lower[d] || pts(i, d) > region.upper[d]) {
        inside = false;
        break;
      }
    }
    if (inside) s += weights[i];
  }
  return s;
}

double gmm_estep(const MatrixXd& pts,
                 const std::vector<PreparedComponent>& comps, MatrixXd& resp) {
  resp.resize(pts.rows(), static_cast<Eigen::Index>(comps.size()));
  double ll = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    ll += estep_point(pts, i, comps, resp);
  return ll;
}

}  // namespace ref

}  // namespace pai::kernels
