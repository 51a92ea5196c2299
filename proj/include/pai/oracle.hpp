#pragma once

#include <functional>
#include <vector>

#include "pai/types.hpp"

// Brute-force validation side: push every concrete sample through the
// network and compare empirical region masses against abstract predictions.

namespace pai::oracle {

struct EmpiricalPushforward {
  WeightedPointSet input;
  WeightedPointSet output;
  std::vector<WeightedPointSet> per_layer;  // after each layer, when recorded
};

/// Maps every point through the network, preserving weights. When
/// record_layers is set, the point set after every layer is kept.
EmpiricalPushforward mc_pushforward(const Network& net,
                                    const WeightedPointSet& d,
                                    bool record_layers);

struct RegionComparison {
  Region region;
  double empirical = 0.0;
  double abstract_mass = 0.0;
  double abs_error = 0.0;
};

struct ComparisonReport {
  std::vector<RegionComparison> entries;
  double max_error = 0.0;
  double mean_error = 0.0;
};

/// Evaluator of the abstraction's mass on a region; the pipeline binds this
/// to whichever abstract domain is active.
using AbstractMassFn = std::function<double(const Region&)>;

/// Per-region |empirical - abstract| over the pushforward's output points.
ComparisonReport compare_region_masses(const EmpiricalPushforward& empirical,
                                       const AbstractMassFn& abstract_mass,
                                       const std::vector<Region>& regions);

/// Deterministic region grid from per-axis quantiles of the point set:
/// `bins` slabs per axis, crossed into a grid for 1 or 2 dimensions and kept
/// as axis-aligned slabs beyond that.
std::vector<Region> quantile_regions(const WeightedPointSet& pts, int bins);

}  // namespace pai::oracle
