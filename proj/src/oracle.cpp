#include "pai/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "pai/kernels.hpp"

namespace pai::oracle {

EmpiricalPushforward mc_pushforward(const Network& net,
                                    const WeightedPointSet& d,
                                    bool record_layers) {
  if (net.size() > 0 && d.dim() != net.input_dim())
    throw DimensionError("point dimension " + std::to_string(d.dim()) +
                         " does not match network input dimension " +
                         std::to_string(net.input_dim()));
  EmpiricalPushforward result;
  result.input = d;
  MatrixXd current = d.points;
  for (const Layer& layer : net.layers) {
    if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
      MatrixXd next;
      kernels::batch_affine(affine->weight, affine->bias, current, next);
      current = std::move(next);
    } else {
      kernels::batch_activation(std::get<ActivationLayer>(layer).kind, current);
    }
    if (record_layers)
      result.per_layer.emplace_back(current, d.weights);
  }
  result.output = WeightedPointSet(std::move(current), d.weights);
  return result;
}

ComparisonReport compare_region_masses(const EmpiricalPushforward& empirical,
                                       const AbstractMassFn& abstract_mass,
                                       const std::vector<Region>& regions) {
  ComparisonReport report;
  report.entries.reserve(regions.size());
  double sum = 0.0;
  for (const Region& region : regions) {
    RegionComparison entry;
    entry.region = region;
    entry.empirical = kernels::region_weight_sum(
        empirical.output.points, empirical.output.weights, region);
    entry.abstract_mass = abstract_mass(region);
    entry.abs_error = std::abs(entry.empirical - entry.abstract_mass);
    report.max_error = std::max(report.max_error, entry.abs_error);
    sum += entry.abs_error;
    report.entries.push_back(std::move(entry));
  }
  report.mean_error =
      regions.empty() ? 0.0 : sum / static_cast<double>(regions.size());
  return report;
}

namespace {

/// Linear-interpolated quantile of a sorted vector at fraction p.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<Region> quantile_regions(const WeightedPointSet& pts, int bins) {
  if (bins < 1) throw ValidationError("bin count must be positive");
  const Eigen::Index dim = pts.dim();
  const Eigen::Index n = pts.count();

  // Per-axis quantile edges, bins+1 of them.
  std::vector<std::vector<double>> edges(static_cast<std::size_t>(dim));
  for (Eigen::Index a = 0; a < dim; ++a) {
    std::vector<double> coords(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      coords[static_cast<std::size_t>(i)] = pts.points(i, a);
    std::sort(coords.begin(), coords.end());
    auto& e = edges[static_cast<std::size_t>(a)];
    e.resize(static_cast<std::size_t>(bins) + 1);
    for (int j = 0; j <= bins; ++j)
      e[static_cast<std::size_t>(j)] =
          quantile_sorted(coords, static_cast<double>(j) / bins);
  }

  std::vector<Region> regions;
  if (dim == 1) {
    for (int j = 0; j < bins; ++j)
      regions.emplace_back(VectorXd::Constant(1, edges[0][j]),
                           VectorXd::Constant(1, edges[0][j + 1]));
  } else if (dim == 2) {
    for (int jx = 0; jx < bins; ++jx) {
      for (int jy = 0; jy < bins; ++jy) {
        VectorXd lo(2), hi(2);
        lo << edges[0][jx], edges[1][jy];
        hi << edges[0][jx + 1], edges[1][jy + 1];
        regions.emplace_back(std::move(lo), std::move(hi));
      }
    }
  } else {
    // Axis-aligned slabs: full range on every other axis.
    for (Eigen::Index a = 0; a < dim; ++a) {
      for (int j = 0; j < bins; ++j) {
        VectorXd lo(dim), hi(dim);
        for (Eigen::Index o = 0; o < dim; ++o) {
          lo[o] = edges[static_cast<std::size_t>(o)].front();
          hi[o] = edges[static_cast<std::size_t>(o)].back();
        }
        lo[a] = edges[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
        hi[a] =
            edges[static_cast<std::size_t>(a)][static_cast<std::size_t>(j) + 1];
        regions.emplace_back(std::move(lo), std::move(hi));
      }
    }
  }
  return regions;
}

}  // namespace pai::oracle
