#pragma once

#include <cstdint>
#include <string>

#include "pai/distribution.hpp"
#include "pai/io.hpp"

// CLI front-end logic: run an abstraction pipeline over a network, stage by
// stage, answering region queries and comparing against the Monte Carlo
// oracle; reports are plain JSON.

namespace pai::cli {

struct PipelineConfig {
  std::string domain;  // polynomial | rbf | fourier | kmeans | gmm

  // distribution domains
  int degree = 4;
  int n_centers = 3;
  std::string kernel = "gaussian";
  double sigma = 0.7071067811865476;  // 1/sqrt(2)

  // cluster domains
  int k = 2;
  int max_iters = 300;
  double tol = 1e-8;
  std::string init = "random_points";
  std::string init_centroids_file;
  bool weighted_kmeans = false;

  // shared
  bool normalize = false;
  bool jacobian_correction = false;
  std::int64_t oracle_samples = 0;   // 0 disables the oracle comparison
  std::int64_t zonotope_samples = 10000;
  std::uint64_t seed = 0;
  int bins = 8;
  int threads = 0;  // 0 keeps the OpenMP default
};

/// Full analysis: fit the chosen abstraction on the input distribution,
/// transform it through every layer, answer the region queries at each
/// stage, optionally compare the final stage against the Monte Carlo oracle.
io::json run_pipeline(const PipelineConfig& cfg, const std::string& network_file,
                      const std::string& dist_file,
                      const std::string& queries_file);

/// Re-answers region queries against the abstractions saved in a report.
io::json query_report(const io::json& report, const std::vector<Region>& regions);

/// CSV for one stage: (x, density) samples for distribution domains,
/// centroid/component rows for cluster domains.
std::string plot_data_csv(const io::json& report, int stage);

/// Standalone Monte Carlo pushforward: per-stage empirical means, query
/// masses, and quantile-bin masses of the final stage.
io::json oracle_run(const PipelineConfig& cfg, const std::string& network_file,
                    const std::string& dist_file,
                    const std::string& queries_file);

}  // namespace pai::cli
