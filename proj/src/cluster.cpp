#include "pai/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pai/core.hpp"
#include "pai/kernels.hpp"
#include "pai/quadrature.hpp"
#include "pai/rng.hpp"

namespace pai::cluster {

namespace {

constexpr double kCovRegularization = 1e-6;

void validate_config(const EmConfig& cfg, const WeightedPointSet& data) {
  if (cfg.k < 1) throw ValidationError("cluster count k must be positive");
  if (cfg.max_iters < 0)
    throw ValidationError("max_iters must be nonnegative");
  if (!(cfg.tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (data.count() < cfg.k)
    throw TooFewPointsError("cannot form " + std::to_string(cfg.k) +
                            " clusters from " + std::to_string(data.count()) +
                            " points");
}

MatrixXd init_random_points(const WeightedPointSet& data, const EmConfig& cfg,
                            Rng& rng) {
  const Eigen::Index n = data.count();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  MatrixXd centroids(cfg.k, data.dim());
  for (int c = 0; c < cfg.k; ++c) {
    std::uint64_t idx = rng.below(static_cast<std::uint64_t>(n));
    while (used[static_cast<std::size_t>(idx)])
      idx = rng.below(static_cast<std::uint64_t>(n));
    used[static_cast<std::size_t>(idx)] = true;
    centroids.row(c) = data.points.row(static_cast<Eigen::Index>(idx));
  }
  return centroids;
}

MatrixXd init_kmeans_plus_plus(const WeightedPointSet& data,
                               const EmConfig& cfg, Rng& rng) {
  const Eigen::Index n = data.count();
  MatrixXd centroids(cfg.k, data.dim());
  centroids.row(0) =
      data.points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  VectorXd dist2 = VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < cfg.k; ++c) {
    for (Eigen::Index i = 0; i < n; ++i)
      dist2[i] = std::min(dist2[i],
                          (data.points.row(i) - centroids.row(c - 1)).squaredNorm());
    const double total = dist2.sum();
    if (total <= 0.0) {
      // All remaining points coincide with chosen centroids; fall back to
      // the first unused index order.
      centroids.row(c) = data.points.row(std::min<Eigen::Index>(c, n - 1));
      continue;
    }
    double r = rng.uniform01() * total;
    Eigen::Index pick = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      r -= dist2[i];
      if (r <= 0.0) {
        pick = i;
        break;
      }
    }
    centroids.row(c) = data.points.row(pick);
  }
  return centroids;
}

MatrixXd initial_centroids(const WeightedPointSet& data, const EmConfig& cfg) {
  switch (cfg.init) {
    case InitKind::given:
      if (cfg.given_centroids.rows() != cfg.k ||
          cfg.given_centroids.cols() != data.dim())
        throw ValidationError(
            "init 'given' requires a k x dim matrix of initial centroids");
      return cfg.given_centroids;
    case InitKind::kmeans_plus_plus: {
      Rng rng = make_stream(cfg.seed, Stream::kmeans);
      return init_kmeans_plus_plus(data, cfg, rng);
    }
    case InitKind::random_points:
    default: {
      Rng rng = make_stream(cfg.seed, Stream::kmeans);
      return init_random_points(data, cfg, rng);
    }
  }
}

/// Replaces centroids of empty clusters with the points farthest from their
/// assigned centroids (distance descending, index ascending).
void reseed_empty_clusters(const MatrixXd& pts,
                           const std::vector<std::int32_t>& labels,
                           const std::vector<int>& empty, MatrixXd& centroids) {
  const Eigen::Index n = pts.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  VectorXd dist2(n);
  for (Eigen::Index i = 0; i < n; ++i)
    dist2[i] =
        (pts.row(i) - centroids.row(labels[static_cast<std::size_t>(i)]))
            .squaredNorm();
  std::sort(order.begin(), order.end(), [&dist2](Eigen::Index a, Eigen::Index b) {
    if (dist2[a] != dist2[b]) return dist2[a] > dist2[b];
    return a < b;
  });
  for (std::size_t e = 0; e < empty.size() && e < order.size(); ++e)
    centroids.row(empty[e]) = pts.row(order[e]);
}

}  // namespace

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::random_points: return "random_points";
    case InitKind::kmeans_plus_plus: return "kmeans_plus_plus";
    case InitKind::given: return "given";
  }
  return "random_points";
}

InitKind init_from_string(const std::string& name) {
  if (name == "random_points") return InitKind::random_points;
  if (name == "kmeans_plus_plus") return InitKind::kmeans_plus_plus;
  if (name == "given") return InitKind::given;
  throw ValidationError("unknown init kind '" + name + "'");
}

CentroidAbstraction kmeans_fit(const WeightedPointSet& data,
                               const EmConfig& cfg) {
  validate_config(cfg, data);
  MatrixXd centroids = initial_centroids(data, cfg);
  std::vector<std::int32_t> labels;
  std::vector<double> history;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    auto fresh = kernels::assign_nearest(data.points, centroids);
    history.push_back(
        kernels::assignment_sq_error(data.points, centroids, fresh));
    const bool unchanged = iter > 0 && fresh == labels;
    labels = std::move(fresh);
    if (unchanged) break;

    const auto moments = kernels::cluster_moments(
        data.points, data.weights, labels, cfg.k, cfg.weighted_means);
    MatrixXd updated(cfg.k, data.dim());
    std::vector<int> empty;
    for (int c = 0; c < cfg.k; ++c) {
      const double denom =
          cfg.weighted_means ? moments.weight_sums[c] : moments.counts[c];
      if (denom > 0.0)
        updated.row(c) = moments.coord_sums.row(c) / denom;
      else
        empty.push_back(c);
    }
    if (!empty.empty()) {
      for (int c : empty) updated.row(c) = centroids.row(c);
      reseed_empty_clusters(data.points, labels, empty, updated);
    }

    double movement = 0.0;
    for (int c = 0; c < cfg.k; ++c)
      movement = std::max(movement, (updated.row(c) - centroids.row(c)).norm());
    centroids = std::move(updated);
    if (movement < cfg.tol) break;
  }

  // Final assignment against the final centroids, so the stored labels are
  // exactly reproducible by one more assignment pass.
  labels = kernels::assign_nearest(data.points, centroids);
  history.push_back(kernels::assignment_sq_error(data.points, centroids, labels));
  const auto moments = kernels::cluster_moments(data.points, data.weights,
                                                labels, cfg.k, false);

  CentroidAbstraction out;
  out.centroids = std::move(centroids);
  out.masses = moments.weight_sums;
  out.assignments = std::move(labels);
  out.objective_history = std::move(history);
  return out;
}

double kmeans_objective(const WeightedPointSet& data,
                        const CentroidAbstraction& abst) {
  if (abst.assignments.empty())
    throw StateError("the abstraction carries no assignments");
  if (static_cast<Eigen::Index>(abst.assignments.size()) != data.count())
    throw DimensionError("assignment count does not match point count");
  for (std::int32_t label : abst.assignments)
    if (label < 0 || label >= abst.centroids.rows())
      throw IndexError("assignment label out of range");
  return kernels::assignment_sq_error(data.points, abst.centroids,
                                      abst.assignments);
}

CentroidAbstraction transform_centroids(const CentroidAbstraction& abst,
                                        const Network& net) {
  if (net.size() > 0 && abst.centroids.cols() != net.input_dim())
    throw DimensionError("centroid dimension " +
                         std::to_string(abst.centroids.cols()) +
                         " does not match network input dimension " +
                         std::to_string(net.input_dim()));
  CentroidAbstraction out;
  out.centroids.resize(abst.centroids.rows(),
                       net.size() > 0 ? net.output_dim() : abst.centroids.cols());
  for (Eigen::Index c = 0; c < abst.centroids.rows(); ++c)
    out.centroids.row(c) =
        forward_eval(net, abst.centroids.row(c).transpose()).transpose();
  out.masses = abst.masses;
  out.assignments = abst.assignments;
  return out;
}

namespace {

struct GmmParams {
  VectorXd weights;            // k
  MatrixXd means;              // k x dim
  std::vector<MatrixXd> covs;  // k of dim x dim
};

MatrixXd symmetrized(const MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Mixture parameters from a hard labeling: frequency weights, cluster means
/// and covariances (empty clusters fall back to the global covariance).
GmmParams params_from_labels(const WeightedPointSet& data,
                             const std::vector<std::int32_t>& labels,
                             const MatrixXd& means, int k) {
  const Eigen::Index n = data.count();
  const Eigen::Index dim = data.dim();
  GmmParams params;
  params.means = means;
  params.weights.resize(k);
  params.covs.assign(static_cast<std::size_t>(k), MatrixXd::Zero(dim, dim));

  VectorXd counts = VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i)
    counts[labels[static_cast<std::size_t>(i)]] += 1.0;

  const VectorXd global_mean = data.points.colwise().mean().transpose();
  MatrixXd global_cov = MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const VectorXd d = data.points.row(i).transpose() - global_mean;
    global_cov.noalias() += d * d.transpose();
  }
  global_cov /= static_cast<double>(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int32_t c = labels[static_cast<std::size_t>(i)];
    const VectorXd d = data.points.row(i).transpose() - means.row(c).transpose();
    params.covs[static_cast<std::size_t>(c)].noalias() += d * d.transpose();
  }

  const bool any_empty = (counts.array() == 0.0).any();
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0.0)
      params.covs[static_cast<std::size_t>(c)] /= counts[c];
    else
      params.covs[static_cast<std::size_t>(c)] = global_cov;
    params.covs[static_cast<std::size_t>(c)] +=
        kCovRegularization * MatrixXd::Identity(dim, dim);
    params.weights[c] =
        any_empty ? (counts[c] + 1.0) / (static_cast<double>(n) + k)
                  : counts[c] / static_cast<double>(n);
  }
  return params;
}

std::vector<kernels::PreparedComponent> prepare_all(const GmmParams& params) {
  std::vector<kernels::PreparedComponent> comps;
  comps.reserve(static_cast<std::size_t>(params.weights.size()));
  for (Eigen::Index c = 0; c < params.weights.size(); ++c)
    comps.push_back(kernels::prepare_component(
        params.weights[c], params.means.row(c).transpose(),
        params.covs[static_cast<std::size_t>(c)]));
  return comps;
}

}  // namespace

GmmAbstraction gmm_fit(const WeightedPointSet& data, const EmConfig& cfg) {
  validate_config(cfg, data);
  const Eigen::Index n = data.count();
  const Eigen::Index dim = data.dim();
  bool all_identical = true;
  for (Eigen::Index i = 1; i < n && all_identical; ++i)
    all_identical = data.points.row(i) == data.points.row(0);
  if (all_identical)
    throw DegenerateDataError("all points are identical; no mixture to fit");

  // Initialize from a hard clustering (or the provided means).
  GmmParams params;
  if (cfg.init == InitKind::given) {
    if (cfg.given_centroids.rows() != cfg.k ||
        cfg.given_centroids.cols() != dim)
      throw ValidationError(
          "init 'given' requires a k x dim matrix of initial means");
    const auto labels =
        kernels::assign_nearest(data.points, cfg.given_centroids);
    params = params_from_labels(data, labels, cfg.given_centroids, cfg.k);
  } else {
    const auto hard = kmeans_fit(data, cfg);
    params = params_from_labels(data, hard.assignments, hard.centroids, cfg.k);
  }

  std::vector<double> history;
  MatrixXd resp;
  double prev_ll = -std::numeric_limits<double>::infinity();
  int iter = 0;
  while (true) {
    const auto comps = prepare_all(params);
    const double ll = kernels::gmm_estep(data.points, comps, resp);
    history.push_back(ll);
    if (iter >= cfg.max_iters) break;
    if (iter > 0 && ll - prev_ll < cfg.tol) break;
    prev_ll = ll;

    const auto moments = kernels::gmm_moments(data.points, resp, data.weights);
    for (int c = 0; c < cfg.k; ++c) {
      const double m = moments.resp_sums[c];
      if (!(m > 0.0))
        throw DegenerateDataError("mixture component collapsed to zero mass");
      params.weights[c] = m / static_cast<double>(n);
      params.means.row(c) = moments.mean_sums.row(c) / m;
    }
    std::vector<MatrixXd> scatter;
    kernels::gmm_scatter(data.points, resp, params.means, scatter);
    for (int c = 0; c < cfg.k; ++c) {
      MatrixXd cov = scatter[static_cast<std::size_t>(c)] / moments.resp_sums[c];
      cov += kCovRegularization * MatrixXd::Identity(dim, dim);
      params.covs[static_cast<std::size_t>(c)] = symmetrized(cov);
    }
    ++iter;
  }

  const auto moments = kernels::gmm_moments(data.points, resp, data.weights);
  GmmAbstraction out;
  out.components.reserve(static_cast<std::size_t>(cfg.k));
  for (int c = 0; c < cfg.k; ++c) {
    GmmComponent comp;
    comp.weight = params.weights[c];
    comp.mean = params.means.row(c).transpose();
    comp.covariance = params.covs[static_cast<std::size_t>(c)];
    out.components.push_back(std::move(comp));
  }
  out.masses = moments.mass_sums;
  out.responsibilities = std::move(resp);
  out.loglik_history = std::move(history);
  return out;
}

GmmAbstraction transform_gmm(const GmmAbstraction& abst,
                             const AffineLayer& layer) {
  GmmAbstraction out;
  out.components.reserve(abst.components.size());
  for (const GmmComponent& comp : abst.components) {
    if (comp.mean.size() != layer.in_dim())
      throw DimensionError("component dimension " +
                           std::to_string(comp.mean.size()) +
                           " does not match layer input dimension " +
                           std::to_string(layer.in_dim()));
    GmmComponent mapped;
    mapped.weight = comp.weight;
    mapped.mean = layer.apply(comp.mean);
    mapped.covariance = symmetrized(layer.weight * comp.covariance *
                                    layer.weight.transpose());
    out.components.push_back(std::move(mapped));
  }
  out.masses = abst.masses;
  out.responsibilities = abst.responsibilities;
  return out;
}

GmmAbstraction transform_gmm(const GmmAbstraction& abst, const Layer& layer) {
  if (const auto* affine = std::get_if<AffineLayer>(&layer))
    return transform_gmm(abst, *affine);
  throw UnsupportedLayerError(
      "the GMM transformer is defined for affine layers only");
}

double region_mass_abstract(const CentroidAbstraction& abst, const Region& r) {
  if (abst.centroids.cols() != r.dim())
    throw DimensionError("centroid dimension does not match region dimension");
  double mass = 0.0;
  for (Eigen::Index c = 0; c < abst.centroids.rows(); ++c)
    if (r.contains(abst.centroids.row(c).transpose())) mass += abst.masses[c];
  return mass;
}

double region_mass_abstract(const GmmAbstraction& abst, const Region& r) {
  double mass = 0.0;
  for (std::size_t c = 0; c < abst.components.size(); ++c) {
    const GmmComponent& comp = abst.components[c];
    if (comp.mean.size() != r.dim())
      throw DimensionError("component dimension does not match region dimension");
    mass += abst.masses[static_cast<Eigen::Index>(c)] *
            quad::normal_box_mass(comp.mean, comp.covariance, r);
  }
  return mass;
}

}  // namespace pai::cluster
