#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "pai/types.hpp"

// Distribution-approximation abstract domains: parametric density models over
// one data dimension plus one probability dimension, pushed through invertible
// affine maps by composition with the inverse (optionally with a jacobian
// factor for measure-correct pushforward).

namespace pai::dist {

// ---------------------------------------------------------------------------
// Abstract elements.
// ---------------------------------------------------------------------------

struct PolynomialAbstraction {
  int degree = 0;
  VectorXd coefficients;  // beta_0..beta_degree, ascending powers

  PolynomialAbstraction() = default;
  PolynomialAbstraction(int deg, VectorXd coeffs);
};

enum class RbfKernelKind { gaussian, multiquadric, inverse_multiquadric,
                           thin_plate_spline };

std::string to_string(RbfKernelKind kind);
RbfKernelKind rbf_kernel_from_string(const std::string& name);

struct RbfKernel {
  RbfKernelKind kind = RbfKernelKind::gaussian;
  double sigma = 1.0;  // width; unused by thin_plate_spline

  RbfKernel() = default;
  RbfKernel(RbfKernelKind k, double s);
};

/// phi(d) for the kernel. thin_plate_spline takes the limit value 0 at d=0.
double rbf_phi(const RbfKernel& kernel, double d);

struct RbfAbstraction {
  RbfKernel kernel;
  MatrixXd centers;        // N x dim
  VectorXd coefficients;   // a_i, length N
  VectorXd center_values;  // y at the chosen centers (provenance)

  RbfAbstraction() = default;
  RbfAbstraction(RbfKernel k, MatrixXd c, VectorXd a, VectorXd values);
};

/// One Gaussian term of a closed-form spectrum:
/// amplitude * (sqrt(pi) * width)^d * exp(-width^2 |w|^2 / 4) * exp(-j w.c),
/// the transform of the density amplitude * exp(-|x - c|^2 / width^2).
struct FourierTerm {
  double amplitude = 0.0;
  VectorXd center;
  double width = 1.0;
};

struct FourierAbstraction {
  std::vector<FourierTerm> terms;
};

struct DistAbstraction;

/// Evaluation of a stored inner abstraction after an inverse affine map:
/// value(x) = scale * inner(inverse(x)). Composing again only rewrites
/// `inverse` and `scale`, so chains stay one level deep.
struct ComposedAbstraction {
  AffineLayer inverse;
  double scale = 1.0;
  std::shared_ptr<const DistAbstraction> inner;
};

struct DistAbstraction {
  std::variant<PolynomialAbstraction, RbfAbstraction, ComposedAbstraction> value;
};

// ---------------------------------------------------------------------------
// Fitting.
// ---------------------------------------------------------------------------

/// Least-squares fit of probability against data value for one-dimensional
/// points: row k of the design matrix is (1, x_k, ..., x_k^degree) and the
/// target is the point's weight. Solved by column-pivoted QR.
PolynomialAbstraction fit_polynomial(const WeightedPointSet& data, int degree);

/// Solves the square system sum_i a_i phi(|c_k - c_i|) = y_k.
VectorXd solve_rbf_interpolation(const MatrixXd& centers, const VectorXd& values,
                                 const RbfKernel& kernel);

struct RbfFitInfo {
  std::uint64_t combinations = 0;  // enumerated center subsets
  std::uint64_t skipped = 0;       // subsets with singular systems
  double rms = 0.0;
  std::vector<int> chosen_indices;  // into the data point list, ascending
};

/// Exhaustive search over all C(m, n_centers) subsets of the (1-D) data
/// points, scoring each interpolant by its probability-vs-value RMS over the
/// whole dataset; ties break to the lexicographically smallest index tuple.
/// Refuses searches beyond 10^6 combinations.
RbfAbstraction fit_rbf_exhaustive(const WeightedPointSet& data, int n_centers,
                                  const RbfKernel& kernel,
                                  RbfFitInfo* info = nullptr);

// ---------------------------------------------------------------------------
// Evaluation and transformers.
// ---------------------------------------------------------------------------

double eval_distribution(const PolynomialAbstraction& abst, const VectorXd& x);
double eval_distribution(const RbfAbstraction& abst, const VectorXd& x);
double eval_distribution(const DistAbstraction& abst, const VectorXd& x);

/// One-dimensional convenience overload.
double eval_distribution(const DistAbstraction& abst, double x);

/// Pushes the model through an invertible affine layer: the result evaluates
/// at x to eval(abst, f^-1(x)) (times |det f^-1| when `jacobian_correction`).
/// Gaussian RBF models under scaled isometries and 1-D polynomials stay in
/// closed form; everything else becomes a ComposedAbstraction.
DistAbstraction transform_distribution(const DistAbstraction& abst,
                                       const AffineLayer& layer,
                                       bool jacobian_correction = false);

/// Integral of the model over [lo, hi] by composite Simpson quadrature.
double integrate_distribution(const DistAbstraction& abst, double lo, double hi);

// ---------------------------------------------------------------------------
// Fourier abstraction (second abstraction step; 1-D).
// ---------------------------------------------------------------------------

/// Closed-form spectrum of a gaussian-kernel RBF model.
FourierAbstraction fourier_of_rbf(const RbfAbstraction& abst);

/// F(omega) for one-dimensional spectra.
std::complex<double> eval_fourier(const FourierAbstraction& abst, double omega);

/// The density whose spectrum the abstraction stores:
/// sum_i a_i exp(-((x - c_i) / w_i)^2).
double fourier_density(const FourierAbstraction& abst, double x);

/// Spectrum of x -> y(f^-1(x)) for a scalar affine layer f(x) = ax + b:
/// F'(omega) = |a| exp(-j omega b) F(a omega); per-term this keeps amplitudes
/// and maps (c, w) to (ac + b, |a| w). `jacobian_correction` divides
/// amplitudes by |a|.
FourierAbstraction transform_fourier(const FourierAbstraction& abst,
                                     const AffineLayer& layer,
                                     bool jacobian_correction = false);

/// Integral of fourier_density over [lo, hi] (Simpson).
double integrate_fourier(const FourierAbstraction& abst, double lo, double hi);

}  // namespace pai::dist
