#include "pai/distribution.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>

#include "pai/core.hpp"
#include "pai/kernels.hpp"
#include "pai/quadrature.hpp"

namespace pai::dist {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// If W^T W == s^2 I within tolerance, returns s (the uniform scale).
std::optional<double> scaled_isometry_factor(const MatrixXd& w) {
  if (w.rows() != w.cols()) return std::nullopt;
  const MatrixXd m = w.transpose() * w;
  const double s2 = m.diagonal().mean();
  const double tol = 1e-12 * std::max(1.0, s2);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double target = r == c ? s2 : 0.0;
      if (std::abs(m(r, c) - target) > tol) return std::nullopt;
    }
  }
  if (!(s2 > 0.0)) return std::nullopt;
  return std::sqrt(s2);
}

}  // namespace

PolynomialAbstraction::PolynomialAbstraction(int deg, VectorXd coeffs)
    : degree(deg), coefficients(std::move(coeffs)) {
  if (degree < 0) throw ValidationError("polynomial degree must be nonnegative");
  if (coefficients.size() != degree + 1)
    throw DimensionError("polynomial needs degree+1 coefficients");
  require_finite(coefficients, "polynomial coefficients");
}

std::string to_string(RbfKernelKind kind) {
  switch (kind) {
    case RbfKernelKind::gaussian: return "gaussian";
    case RbfKernelKind::multiquadric: return "multiquadric";
    case RbfKernelKind::inverse_multiquadric: return "inverse_multiquadric";
    case RbfKernelKind::thin_plate_spline: return "thin_plate_spline";
  }
  return "gaussian";
}

RbfKernelKind rbf_kernel_from_string(const std::string& name) {
  if (name == "gaussian") return RbfKernelKind::gaussian;
  if (name == "multiquadric") return RbfKernelKind::multiquadric;
  if (name == "inverse_multiquadric") return RbfKernelKind::inverse_multiquadric;
  if (name == "thin_plate_spline") return RbfKernelKind::thin_plate_spline;
  throw ValidationError("unknown RBF kernel '" + name + "'");
}

RbfKernel::RbfKernel(RbfKernelKind k, double s) : kind(k), sigma(s) {
  if (kind != RbfKernelKind::thin_plate_spline && !(sigma > 0.0))
    throw ValidationError("kernel width sigma must be positive");
  if (!std::isfinite(sigma)) throw ValidationError("kernel width must be finite");
}

double rbf_phi(const RbfKernel& kernel, double d) {
  switch (kernel.kind) {
    case RbfKernelKind::gaussian:
      return std::exp(-d * d / (2.0 * kernel.sigma * kernel.sigma));
    case RbfKernelKind::multiquadric:
      return std::sqrt(d * d + kernel.sigma * kernel.sigma);
    case RbfKernelKind::inverse_multiquadric:
      return 1.0 / std::sqrt(d * d + kernel.sigma * kernel.sigma);
    case RbfKernelKind::thin_plate_spline:
      return d == 0.0 ? 0.0 : d * d * std::log(d);
  }
  return 0.0;
}

RbfAbstraction::RbfAbstraction(RbfKernel k, MatrixXd c, VectorXd a,
                               VectorXd values)
    : kernel(k),
      centers(std::move(c)),
      coefficients(std::move(a)),
      center_values(std::move(values)) {
  if (centers.rows() == 0) throw DimensionError("RBF model needs centers");
  if (coefficients.size() != centers.rows())
    throw DimensionError("RBF coefficient count must match center count");
  if (center_values.size() != 0 && center_values.size() != centers.rows())
    throw DimensionError("RBF center-value count must match center count");
  require_finite(centers, "RBF centers");
  require_finite(coefficients, "RBF coefficients");
  for (Eigen::Index i = 0; i < centers.rows(); ++i)
    for (Eigen::Index j = i + 1; j < centers.rows(); ++j)
      if (centers.row(i) == centers.row(j))
        throw ValidationError("RBF centers must be distinct");
}

PolynomialAbstraction fit_polynomial(const WeightedPointSet& data, int degree) {
  if (degree < 0) throw ValidationError("polynomial degree must be nonnegative");
  if (data.dim() != 1)
    throw DimensionError("polynomial fitting supports one-dimensional data");
  const Eigen::Index n = data.count();
  const Eigen::Index cols = degree + 1;
  if (n < cols)
    throw UnderdeterminedError("need at least " + std::to_string(cols) +
                               " points for degree " + std::to_string(degree));
  MatrixXd x(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    double pow = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      x(i, j) = pow;
      pow *= data.points(i, 0);
    }
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
  if (qr.rank() < cols)
    throw RankDeficientError("design matrix is rank deficient (rank " +
                             std::to_string(qr.rank()) + " of " +
                             std::to_string(cols) + ")");
  return PolynomialAbstraction(degree, qr.solve(data.weights));
}

VectorXd solve_rbf_interpolation(const MatrixXd& centers, const VectorXd& values,
                                 const RbfKernel& kernel) {
  if (centers.rows() != values.size())
    throw DimensionError("center count must match value count");
  if (centers.rows() == 0) throw DimensionError("empty interpolation system");
  const Eigen::Index k = centers.rows();
  MatrixXd m(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c)
      m(r, c) = rbf_phi(kernel, (centers.row(r) - centers.row(c)).norm());
  Eigen::FullPivLU<MatrixXd> lu(m);
  if (!lu.isInvertible())
    throw SingularSystemError("RBF interpolation matrix is singular");
  VectorXd a = lu.solve(values);
  const double scale = std::max(1.0, values.lpNorm<Eigen::Infinity>());
  if ((m * a - values).lpNorm<Eigen::Infinity>() > 1e-9 * scale)
    throw SingularSystemError("RBF interpolation residual is too large");
  return a;
}

RbfAbstraction fit_rbf_exhaustive(const WeightedPointSet& data, int n_centers,
                                  const RbfKernel& kernel, RbfFitInfo* info) {
  if (data.dim() != 1)
    throw DimensionError("exhaustive center search supports one-dimensional data");
  if (n_centers < 1) throw ValidationError("center count must be positive");
  const Eigen::Index m = data.count();
  if (m < n_centers)
    throw TooFewPointsError("need at least " + std::to_string(n_centers) +
                            " points to choose " + std::to_string(n_centers) +
                            " centers");
  const std::uint64_t total =
      kernels::binomial(static_cast<std::uint64_t>(m),
                        static_cast<std::uint64_t>(n_centers));
  if (total > 1000000ULL)
    throw SearchSpaceError("center search space has " + std::to_string(total) +
                           " combinations; the cap is 1000000");
  const VectorXd xs = data.points.col(0);
  const VectorXd& ys = data.weights;
  auto phi = [&kernel](double d) { return rbf_phi(kernel, d); };
  auto result = kernels::rbf_search(xs, ys, n_centers, phi);
  if (!result)
    throw NoFeasibleModelError("every center combination was singular");
  MatrixXd centers(n_centers, 1);
  VectorXd values(n_centers);
  for (int i = 0; i < n_centers; ++i) {
    centers(i, 0) = xs[result->combo[static_cast<std::size_t>(i)]];
    values[i] = ys[result->combo[static_cast<std::size_t>(i)]];
  }
  if (info != nullptr) {
    info->combinations = result->combos_total;
    info->skipped = result->combos_skipped;
    info->rms = result->rms;
    info->chosen_indices = result->combo;
  }
  return RbfAbstraction(kernel, std::move(centers), result->coefficients,
                        std::move(values));
}

double eval_distribution(const PolynomialAbstraction& abst, const VectorXd& x) {
  if (x.size() != 1)
    throw DimensionError("polynomial models are one-dimensional");
  double value = 0.0;
  for (Eigen::Index j = abst.coefficients.size() - 1; j >= 0; --j)
    value = value * x[0] + abst.coefficients[j];
  return value;
}

double eval_distribution(const RbfAbstraction& abst, const VectorXd& x) {
  if (x.size() != abst.centers.cols())
    throw DimensionError("point dimension " + std::to_string(x.size()) +
                         " does not match RBF center dimension " +
                         std::to_string(abst.centers.cols()));
  double value = 0.0;
  for (Eigen::Index i = 0; i < abst.centers.rows(); ++i)
    value += abst.coefficients[i] *
             rbf_phi(abst.kernel, (x.transpose() - abst.centers.row(i)).norm());
  return value;
}

double eval_distribution(const DistAbstraction& abst, const VectorXd& x) {
  return std::visit(
      [&x](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ComposedAbstraction>) {
          return a.scale * eval_distribution(*a.inner, a.inverse.apply(x));
        } else {
          return eval_distribution(a, x);
        }
      },
      abst.value);
}

double eval_distribution(const DistAbstraction& abst, double x) {
  VectorXd v(1);
  v[0] = x;
  return eval_distribution(abst, v);
}

namespace {

PolynomialAbstraction transform_polynomial(const PolynomialAbstraction& abst,
                                           const AffineLayer& inverse,
                                           double jscale) {
  if (inverse.weight.rows() != 1)
    throw DimensionError("polynomial models are one-dimensional");
  // p(alpha x + gamma) re-expanded in powers of x via the binomial theorem.
  const double alpha = inverse.weight(0, 0);
  const double gamma = inverse.bias[0];
  const int m = abst.degree;
  VectorXd out = VectorXd::Zero(m + 1);
  for (int k = 0; k <= m; ++k) {
    double alpha_pow = 1.0;
    for (int j = 0; j <= k; ++j) {
      const double choose = static_cast<double>(
          kernels::binomial(static_cast<std::uint64_t>(k),
                            static_cast<std::uint64_t>(j)));
      out[j] += abst.coefficients[k] * choose * alpha_pow *
                std::pow(gamma, static_cast<double>(k - j));
      alpha_pow *= alpha;
    }
  }
  return PolynomialAbstraction(m, jscale * out);
}

}  // namespace

DistAbstraction transform_distribution(const DistAbstraction& abst,
                                       const AffineLayer& layer,
                                       bool jacobian_correction) {
  const AffineLayer inverse = affine_invert(layer);
  const double jscale =
      jacobian_correction ? affine_abs_det(inverse) : 1.0;

  if (const auto* poly = std::get_if<PolynomialAbstraction>(&abst.value))
    return DistAbstraction{transform_polynomial(*poly, inverse, jscale)};

  if (const auto* rbf = std::get_if<RbfAbstraction>(&abst.value)) {
    if (rbf->kernel.kind == RbfKernelKind::gaussian &&
        rbf->centers.cols() == layer.in_dim()) {
      if (auto s = scaled_isometry_factor(layer.weight)) {
        // |f^-1(x) - c| = |x - (Wc + b)| / s, so the model stays a gaussian
        // RBF with mapped centers and width scaled by s.
        MatrixXd centers(rbf->centers.rows(), rbf->centers.cols());
        for (Eigen::Index i = 0; i < centers.rows(); ++i)
          centers.row(i) =
              (layer.weight * rbf->centers.row(i).transpose() + layer.bias)
                  .transpose();
        RbfKernel kernel(RbfKernelKind::gaussian, *s * rbf->kernel.sigma);
        return DistAbstraction{RbfAbstraction(kernel, std::move(centers),
                                              jscale * rbf->coefficients,
                                              rbf->center_values)};
      }
    }
  }

  if (const auto* comp = std::get_if<ComposedAbstraction>(&abst.value)) {
    ComposedAbstraction out;
    out.inverse = compose_affine(inverse, comp->inverse);
    out.scale = jscale * comp->scale;
    out.inner = comp->inner;
    return DistAbstraction{std::move(out)};
  }

  ComposedAbstraction out;
  out.inverse = inverse;
  out.scale = jscale;
  out.inner = std::make_shared<const DistAbstraction>(abst);
  return DistAbstraction{std::move(out)};
}

double integrate_distribution(const DistAbstraction& abst, double lo,
                              double hi) {
  return quad::simpson([&abst](double x) { return eval_distribution(abst, x); },
                       lo, hi);
}

FourierAbstraction fourier_of_rbf(const RbfAbstraction& abst) {
  if (abst.kernel.kind != RbfKernelKind::gaussian)
    throw UnsupportedKernelError(
        "the Fourier abstraction requires a gaussian kernel, got " +
        to_string(abst.kernel.kind));
  if (abst.centers.cols() != 1)
    throw DimensionError("the Fourier abstraction is one-dimensional");
  FourierAbstraction out;
  out.terms.reserve(static_cast<std::size_t>(abst.centers.rows()));
  // exp(-d^2/(2 sigma^2)) == exp(-(d/w)^2) with w = sqrt(2) sigma.
  const double width = std::sqrt(2.0) * abst.kernel.sigma;
  for (Eigen::Index i = 0; i < abst.centers.rows(); ++i) {
    FourierTerm term;
    term.amplitude = abst.coefficients[i];
    term.center = abst.centers.row(i).transpose();
    term.width = width;
    out.terms.push_back(std::move(term));
  }
  return out;
}

std::complex<double> eval_fourier(const FourierAbstraction& abst,
                                  double omega) {
  std::complex<double> value(0.0, 0.0);
  for (const FourierTerm& term : abst.terms) {
    if (term.center.size() != 1)
      throw DimensionError("spectrum evaluation is one-dimensional");
    const double mag = term.amplitude * std::sqrt(kPi) * term.width *
                       std::exp(-term.width * term.width * omega * omega / 4.0);
    value += std::polar(mag, -omega * term.center[0]);
  }
  return value;
}

double fourier_density(const FourierAbstraction& abst, double x) {
  double value = 0.0;
  for (const FourierTerm& term : abst.terms) {
    if (term.center.size() != 1)
      throw DimensionError("density evaluation is one-dimensional");
    const double u = (x - term.center[0]) / term.width;
    value += term.amplitude * std::exp(-u * u);
  }
  return value;
}

FourierAbstraction transform_fourier(const FourierAbstraction& abst,
                                     const AffineLayer& layer,
                                     bool jacobian_correction) {
  if (layer.weight.rows() != 1 || layer.weight.cols() != 1)
    throw DimensionError("the Fourier transformer requires a scalar layer");
  const double a = layer.weight(0, 0);
  if (a == 0.0) throw NotInvertibleError("scalar layer with a = 0");
  const double b = layer.bias[0];
  const double amp_scale = jacobian_correction ? 1.0 / std::abs(a) : 1.0;
  FourierAbstraction out;
  out.terms.reserve(abst.terms.size());
  // F'(w) = |a| e^{-jwb} F(aw): per term the width picks up |a|, the center
  // maps through f, and the amplitude is untouched (composition semantics).
  for (const FourierTerm& term : abst.terms) {
    if (term.center.size() != 1)
      throw DimensionError("the Fourier transformer is one-dimensional");
    FourierTerm mapped;
    mapped.amplitude = amp_scale * term.amplitude;
    mapped.center = VectorXd::Constant(1, a * term.center[0] + b);
    mapped.width = std::abs(a) * term.width;
    out.terms.push_back(std::move(mapped));
  }
  return out;
}

double integrate_fourier(const FourierAbstraction& abst, double lo, double hi) {
  return quad::simpson([&abst](double x) { return fourier_density(abst, x); },
                       lo, hi);
}

}  // namespace pai::dist
