#include "pai/quadrature.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace pai::quad {

double simpson(const std::function<double(double)>& f, double lo, double hi,
               int nodes) {
  if (nodes < 3 || nodes % 2 == 0)
    throw ValidationError("Simpson rule needs an odd node count >= 3");
  if (!(hi >= lo)) throw ValidationError("integration bounds out of order");
  if (hi == lo) return 0.0;
  const double h = (hi - lo) / static_cast<double>(nodes - 1);
  double sum = f(lo) + f(hi);
  for (int i = 1; i < nodes - 1; ++i)
    sum += f(lo + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights) {
  if (n < 1) throw ValidationError("quadrature order must be positive");
  nodes.resize(n);
  weights.resize(n);
  const double pi = 3.14159265358979323846;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

bool exactly_diagonal(const MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (r != c && m(r, c) != 0.0) return false;
  return true;
}

int nodes_per_axis(Eigen::Index dim) {
  if (dim <= 2) return 64;
  if (dim == 3) return 24;
  return 8;
}

}  // namespace

double normal_box_mass(const VectorXd& mean, const MatrixXd& cov,
                       const Region& region) {
  const Eigen::Index d = mean.size();
  if (cov.rows() != d || cov.cols() != d)
    throw DimensionError("covariance shape does not match mean dimension");
  if (region.dim() != d)
    throw DimensionError("region dimension does not match mean dimension");

  if (exactly_diagonal(cov)) {
    double mass = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double var = cov(i, i);
      if (!(var > 0.0))
        throw DegenerateDataError("diagonal covariance entry must be positive");
      const double s = std::sqrt(2.0 * var);
      mass *= 0.5 * (std::erf((region.upper[i] - mean[i]) / s) -
                     std::erf((region.lower[i] - mean[i]) / s));
    }
    return mass;
  }

  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw DegenerateDataError("covariance matrix is not positive definite");
  double log_det = 0.0;
  const MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < d; ++i) log_det += 2.0 * std::log(l(i, i));
  const double log_norm =
      -0.5 * (static_cast<double>(d) * std::log(2.0 * 3.14159265358979323846) +
              log_det);

  const int n = nodes_per_axis(d);
  VectorXd nodes, weights;
  gauss_legendre(n, nodes, weights);

  // Tensor-product quadrature over the box, odometer order.
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  VectorXd x(d);
  double mass = 0.0;
  while (true) {
    double w = 1.0;
    for (Eigen::Index a = 0; a < d; ++a) {
      const double lo = region.lower[a];
      const double hi = region.upper[a];
      const double half = 0.5 * (hi - lo);
      x[a] = lo + half * (nodes[idx[static_cast<std::size_t>(a)]] + 1.0);
      w *= weights[idx[static_cast<std::size_t>(a)]] * half;
    }
    const double q = llt.matrixL().solve(x - mean).squaredNorm();
    mass += w * std::exp(log_norm - 0.5 * q);
    Eigen::Index a = 0;
    for (; a < d; ++a) {
      if (++idx[static_cast<std::size_t>(a)] < n) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
    if (a == d) break;
  }
  return mass;
}

}  // namespace pai::quad
