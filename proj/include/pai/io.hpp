#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pai/cluster.hpp"
#include "pai/distribution.hpp"
#include "pai/types.hpp"

// JSON loading and serialization for networks, distributions, regions, and
// abstract elements. Every parse failure is reported as a ValidationError
// carrying file/path context.

namespace pai::io {

using json = nlohmann::json;

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

json to_json(const VectorXd& v);
json to_json(const MatrixXd& m);
VectorXd vector_from_json(const json& j, const std::string& what);
MatrixXd matrix_from_json(const json& j, const std::string& what);

// Network files: {"layers":[{"type":"affine","weight":[[...]],"bias":[...]},
//                           {"type":"activation","kind":"relu","dim":n}]}
Network parse_network(const json& j);
Network load_network(const std::string& path);
json network_to_json(const Network& net);

// Distribution files: {"type":"points","points":[[...]],"weights":[...]} or
// {"type":"zonotope","center":[...],"generators":[[...]],"samples":N,"seed":S}
// (samples and seed optional; CLI values fill the gaps).
struct DistributionInput {
  std::optional<WeightedPointSet> points;
  std::optional<ZonotopeSource> zonotope;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
};

DistributionInput parse_distribution(const json& j);
DistributionInput load_distribution(const std::string& path);

// Query files: {"regions":[{"lower":[...],"upper":[...]}, ...]}
Region region_from_json(const json& j);
json region_to_json(const Region& r);
std::vector<Region> parse_regions(const json& j);
std::vector<Region> load_regions(const std::string& path);

// Abstract elements.
json to_json(const dist::DistAbstraction& a);
json to_json(const dist::FourierAbstraction& a);
json to_json(const cluster::CentroidAbstraction& a);
json to_json(const cluster::GmmAbstraction& a);

dist::DistAbstraction dist_abstraction_from_json(const json& j);
dist::FourierAbstraction fourier_from_json(const json& j);
cluster::CentroidAbstraction centroids_from_json(const json& j);
cluster::GmmAbstraction gmm_from_json(const json& j);

/// k x dim matrix from a JSON file holding [[...],[...]] (--init-centroids).
MatrixXd load_centroids_file(const std::string& path);

}  // namespace pai::io
