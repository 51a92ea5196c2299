#include "pai/core.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include "pai/kernels.hpp"
#include "pai/rng.hpp"

namespace pai {

VectorXd forward_eval(const Network& net, const VectorXd& x) {
  if (net.size() > 0 && x.size() != net.input_dim())
    throw DimensionError("input has dimension " + std::to_string(x.size()) +
                         ", network expects " +
                         std::to_string(net.input_dim()));
  VectorXd current = x;
  for (const Layer& layer : net.layers) {
    if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
      current = affine->apply(current);
    } else {
      const auto& act = std::get<ActivationLayer>(layer);
      for (Eigen::Index i = 0; i < current.size(); ++i)
        current[i] = apply_activation(act.kind, current[i]);
    }
  }
  return current;
}

AffineLayer affine_invert(const AffineLayer& layer) {
  if (layer.weight.rows() != layer.weight.cols())
    throw NotInvertibleError("affine weight is not square (" +
                             std::to_string(layer.weight.rows()) + "x" +
                             std::to_string(layer.weight.cols()) + ")");
  Eigen::FullPivLU<MatrixXd> lu(layer.weight);
  if (!lu.isInvertible())
    throw NotInvertibleError("affine weight is singular");
  Eigen::JacobiSVD<MatrixXd> svd(layer.weight);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin <= 0.0 || sv[0] / smin > 1e12)
    throw IllConditionedError("affine weight condition estimate exceeds 1e12");
  const MatrixXd inv = lu.inverse();
  return AffineLayer(inv, -(inv * layer.bias));
}

double affine_abs_det(const AffineLayer& layer) {
  if (layer.weight.rows() != layer.weight.cols())
    throw NotInvertibleError("determinant requires a square weight");
  return std::abs(layer.weight.determinant());
}

WeightedPointSet sample_zonotope(const ZonotopeSource& z, std::int64_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw ValidationError("sample count must be at least 1");
  Rng rng = make_stream(seed, Stream::zonotope);
  MatrixXd points(count, z.dim());
  VectorXd x(z.dim());
  for (std::int64_t i = 0; i < count; ++i) {
    x = z.center;
    for (const VectorXd& gen : z.generators) x += rng.uniform_pm1() * gen;
    points.row(i) = x.transpose();
  }
  const VectorXd weights =
      VectorXd::Constant(count, 1.0 / static_cast<double>(count));
  return WeightedPointSet(std::move(points), weights);
}

double region_mass_points(const WeightedPointSet& d, const Region& r) {
  if (d.dim() != r.dim())
    throw DimensionError("point dimension " + std::to_string(d.dim()) +
                         " does not match region dimension " +
                         std::to_string(r.dim()));
  return kernels::region_weight_sum(d.points, d.weights, r);
}

}  // namespace pai
