#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pai/errors.hpp"

namespace pai {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// x -> Wx + b.
struct AffineLayer {
  MatrixXd weight;  // out_dim x in_dim
  VectorXd bias;    // out_dim

  AffineLayer() = default;
  AffineLayer(MatrixXd w, VectorXd b);

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
  VectorXd apply(const VectorXd& x) const;
};

/// g(f(x)) for f then g.
AffineLayer compose_affine(const AffineLayer& f, const AffineLayer& g);

enum class ActivationKind { identity, relu, tanh, sigmoid };

std::string to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);
double apply_activation(ActivationKind kind, double x);

struct ActivationLayer {
  ActivationKind kind = ActivationKind::identity;
  Eigen::Index dim = 0;

  ActivationLayer() = default;
  ActivationLayer(ActivationKind k, Eigen::Index d);
};

using Layer = std::variant<AffineLayer, ActivationLayer>;

Eigen::Index layer_in_dim(const Layer& layer);
Eigen::Index layer_out_dim(const Layer& layer);

/// Ordered feedforward stack. Consecutive dimensions must chain. An empty
/// network is the identity; its input/output dimensions report -1 (any).
struct Network {
  std::vector<Layer> layers;

  Network() = default;
  explicit Network(std::vector<Layer> ls);

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  std::size_t size() const { return layers.size(); }

  /// Single-layer slice, useful for stage-by-stage propagation.
  Network slice(std::size_t index) const;
};

/// Finite concrete distribution: points (one per row) with nonnegative
/// weights. The weight sum must be positive but is not forced to 1.
struct WeightedPointSet {
  MatrixXd points;   // count x dim
  VectorXd weights;  // count

  WeightedPointSet() = default;
  WeightedPointSet(MatrixXd pts, VectorXd ws);

  Eigen::Index count() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  double total_weight() const { return weights.sum(); }

  /// Copy with weights rescaled to sum to 1.
  WeightedPointSet normalized() const;
};

/// center + sum_j eps_j * generator_j with eps in [-1,1]^m.
struct ZonotopeSource {
  VectorXd center;
  std::vector<VectorXd> generators;

  ZonotopeSource() = default;
  ZonotopeSource(VectorXd c, std::vector<VectorXd> gens);

  Eigen::Index dim() const { return center.size(); }
  std::size_t noise_count() const { return generators.size(); }
};

/// Closed axis-aligned box, inclusive on both bounds.
struct Region {
  VectorXd lower;
  VectorXd upper;

  Region() = default;
  Region(VectorXd lo, VectorXd hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const VectorXd& x) const;
};

void require_finite(const MatrixXd& m, const std::string& what);
void require_finite(const VectorXd& v, const std::string& what);

}  // namespace pai
