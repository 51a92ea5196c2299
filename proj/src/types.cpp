#include "pai/types.hpp"

#include <cmath>

namespace pai {

void require_finite(const MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw ValidationError(what + " contains non-finite values");
}

void require_finite(const VectorXd& v, const std::string& what) {
  if (!v.allFinite()) throw ValidationError(what + " contains non-finite values");
}

AffineLayer::AffineLayer(MatrixXd w, VectorXd b)
    : weight(std::move(w)), bias(std::move(b)) {
  if (weight.rows() == 0 || weight.cols() == 0)
    throw DimensionError("affine layer weight must be non-empty");
  if (bias.size() != weight.rows())
    throw DimensionError("affine bias length " + std::to_string(bias.size()) +
                         " does not match weight rows " +
                         std::to_string(weight.rows()));
  require_finite(weight, "affine weight");
  require_finite(bias, "affine bias");
}

VectorXd AffineLayer::apply(const VectorXd& x) const {
  if (x.size() != in_dim())
    throw DimensionError("affine input has dimension " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(in_dim()));
  return weight * x + bias;
}

AffineLayer compose_affine(const AffineLayer& f, const AffineLayer& g) {
  if (g.in_dim() != f.out_dim())
    throw DimensionError("cannot compose: inner output dimension " +
                         std::to_string(f.out_dim()) +
                         " does not match outer input dimension " +
                         std::to_string(g.in_dim()));
  return AffineLayer(g.weight * f.weight, g.weight * f.bias + g.bias);
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::relu: return "relu";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::sigmoid: return "sigmoid";
  }
  return "identity";
}

ActivationKind activation_from_string(const std::string& name) {
  if (name == "identity") return ActivationKind::identity;
  if (name == "relu") return ActivationKind::relu;
  if (name == "tanh") return ActivationKind::tanh;
  if (name == "sigmoid") return ActivationKind::sigmoid;
  throw ValidationError("unknown activation '" + name + "'");
}

double apply_activation(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::identity: return x;
    case ActivationKind::relu: return x > 0.0 ? x : 0.0;
    case ActivationKind::tanh: return std::tanh(x);
    case ActivationKind::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

ActivationLayer::ActivationLayer(ActivationKind k, Eigen::Index d)
    : kind(k), dim(d) {
  if (d <= 0) throw DimensionError("activation layer dimension must be positive");
}

Eigen::Index layer_in_dim(const Layer& layer) {
  return std::visit(
      [](const auto& l) -> Eigen::Index {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, AffineLayer>)
          return l.in_dim();
        else
          return l.dim;
      },
      layer);
}

Eigen::Index layer_out_dim(const Layer& layer) {
  return std::visit(
      [](const auto& l) -> Eigen::Index {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, AffineLayer>)
          return l.out_dim();
        else
          return l.dim;
      },
      layer);
}

Network::Network(std::vector<Layer> ls) : layers(std::move(ls)) {
  if (layers.empty())
    throw DimensionError("network must contain at least one layer");
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (layer_in_dim(layers[i]) != layer_out_dim(layers[i - 1]))
      throw DimensionError(
          "layer " + std::to_string(i) + " expects dimension " +
          std::to_string(layer_in_dim(layers[i])) + " but layer " +
          std::to_string(i - 1) + " produces " +
          std::to_string(layer_out_dim(layers[i - 1])));
  }
}

Eigen::Index Network::input_dim() const {
  return layers.empty() ? -1 : layer_in_dim(layers.front());
}

Eigen::Index Network::output_dim() const {
  return layers.empty() ? -1 : layer_out_dim(layers.back());
}

Network Network::slice(std::size_t index) const {
  if (index >= layers.size())
    throw IndexError("layer index " + std::to_string(index) +
                     " out of range for network of size " +
                     std::to_string(layers.size()));
  return Network({layers[index]});
}

WeightedPointSet::WeightedPointSet(MatrixXd pts, VectorXd ws)
    : points(std::move(pts)), weights(std::move(ws)) {
  if (points.rows() == 0)
    throw DimensionError("weighted point set must contain at least one point");
  if (points.cols() == 0)
    throw DimensionError("weighted points must have positive dimension");
  if (weights.size() != points.rows())
    throw DimensionError("weight count " + std::to_string(weights.size()) +
                         " does not match point count " +
                         std::to_string(points.rows()));
  require_finite(points, "points");
  require_finite(weights, "weights");
  if ((weights.array() < 0.0).any())
    throw ValidationError("point weights must be nonnegative");
  if (weights.sum() <= 0.0)
    throw ValidationError("point weights must not all be zero");
}

WeightedPointSet WeightedPointSet::normalized() const {
  WeightedPointSet out = *this;
  out.weights /= out.weights.sum();
  return out;
}

ZonotopeSource::ZonotopeSource(VectorXd c, std::vector<VectorXd> gens)
    : center(std::move(c)), generators(std::move(gens)) {
  if (center.size() == 0)
    throw DimensionError("zonotope center must be non-empty");
  require_finite(center, "zonotope center");
  for (std::size_t j = 0; j < generators.size(); ++j) {
    if (generators[j].size() != center.size())
      throw DimensionError("zonotope generator " + std::to_string(j) +
                           " has dimension " +
                           std::to_string(generators[j].size()) +
                           ", expected " + std::to_string(center.size()));
    require_finite(generators[j], "zonotope generator");
  }
}

Region::Region(VectorXd lo, VectorXd hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() == 0) throw DimensionError("region must be non-empty");
  if (lower.size() != upper.size())
    throw DimensionError("region bounds have mismatched dimensions");
  require_finite(lower, "region lower bound");
  require_finite(upper, "region upper bound");
  if ((lower.array() > upper.array()).any())
    throw ValidationError("region lower bound exceeds upper bound");
}

bool Region::contains(const VectorXd& x) const {
  if (x.size() != dim())
    throw DimensionError("point dimension " + std::to_string(x.size()) +
                         " does not match region dimension " +
                         std::to_string(dim()));
  return (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

}  // namespace pai
