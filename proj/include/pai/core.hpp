#pragma once

#include <cstdint>

#include "pai/types.hpp"

// Concrete-side semantics: exact network evaluation, affine inversion,
// zonotope discretization, and point-set region masses.

namespace pai {

/// Applies every layer of the network to x.
VectorXd forward_eval(const Network& net, const VectorXd& x);

/// Inverse map g with g(f(x)) = x. The weight must be square and invertible
/// with condition estimate below 1e12.
AffineLayer affine_invert(const AffineLayer& layer);

/// |det W| of a square affine layer.
double affine_abs_det(const AffineLayer& layer);

/// Draws `count` points z(eps) with eps i.i.d. uniform on [-1,1]^m, each
/// weighted 1/count. Deterministic for a fixed seed.
WeightedPointSet sample_zonotope(const ZonotopeSource& z, std::int64_t count,
                                 std::uint64_t seed);

/// Sum of weights of the points inside the closed box.
double region_mass_points(const WeightedPointSet& d, const Region& r);

}  // namespace pai
