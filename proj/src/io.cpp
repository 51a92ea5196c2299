#include "pai/io.hpp"

#include <fstream>

namespace pai::io {

namespace {

/// Runs a parse step, rewriting nlohmann exceptions as ValidationErrors with
/// a human-readable context.
template <class F>
auto guarded(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(context + ": " + e.what());
  }
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

json to_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

VectorXd vector_from_json(const json& j, const std::string& what) {
  return guarded(what, [&] {
    if (!j.is_array()) throw ValidationError(what + " must be an array");
    VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& entry : j) v[i++] = entry.get<double>();
    return v;
  });
}

MatrixXd matrix_from_json(const json& j, const std::string& what) {
  return guarded(what, [&] {
    if (!j.is_array() || j.empty())
      throw ValidationError(what + " must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    MatrixXd m(rows, cols);
    Eigen::Index r = 0;
    for (const auto& row : j) {
      if (static_cast<Eigen::Index>(row.size()) != cols)
        throw ValidationError(what + " rows have inconsistent lengths");
      Eigen::Index c = 0;
      for (const auto& entry : row) m(r, c++) = entry.get<double>();
      ++r;
    }
    return m;
  });
}

Network parse_network(const json& j) {
  return guarded("network", [&] {
    std::vector<Layer> layers;
    for (const auto& jl : j.at("layers")) {
      const std::string type = jl.at("type").get<std::string>();
      if (type == "affine") {
        layers.emplace_back(
            AffineLayer(matrix_from_json(jl.at("weight"), "affine weight"),
                        vector_from_json(jl.at("bias"), "affine bias")));
      } else if (type == "activation") {
        layers.emplace_back(ActivationLayer(
            activation_from_string(jl.at("kind").get<std::string>()),
            jl.at("dim").get<Eigen::Index>()));
      } else {
        throw ValidationError("unknown layer type '" + type + "'");
      }
    }
    return Network(std::move(layers));
  });
}

Network load_network(const std::string& path) {
  return parse_network(load_json_file(path));
}

json network_to_json(const Network& net) {
  json layers = json::array();
  for (const Layer& layer : net.layers) {
    if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
      layers.push_back({{"type", "affine"},
                        {"weight", to_json(affine->weight)},
                        {"bias", to_json(affine->bias)}});
    } else {
      const auto& act = std::get<ActivationLayer>(layer);
      layers.push_back({{"type", "activation"},
                        {"kind", to_string(act.kind)},
                        {"dim", act.dim}});
    }
  }
  return json{{"layers", std::move(layers)}};
}

DistributionInput parse_distribution(const json& j) {
  return guarded("distribution", [&] {
    DistributionInput input;
    const std::string type = j.at("type").get<std::string>();
    if (type == "points") {
      input.points = WeightedPointSet(
          matrix_from_json(j.at("points"), "points"),
          vector_from_json(j.at("weights"), "weights"));
    } else if (type == "zonotope") {
      const VectorXd center = vector_from_json(j.at("center"), "center");
      std::vector<VectorXd> generators;
      for (const auto& g : j.at("generators"))
        generators.push_back(vector_from_json(g, "generator"));
      input.zonotope = ZonotopeSource(center, std::move(generators));
      if (j.contains("samples")) {
        const auto samples = j.at("samples").get<std::int64_t>();
        if (samples < 1)
          throw ValidationError("zonotope sample count must be at least 1");
        input.samples = samples;
      }
      if (j.contains("seed"))
        input.seed = j.at("seed").get<std::uint64_t>();
    } else {
      throw ValidationError("unknown distribution type '" + type + "'");
    }
    return input;
  });
}

DistributionInput load_distribution(const std::string& path) {
  return parse_distribution(load_json_file(path));
}

Region region_from_json(const json& j) {
  return guarded("region", [&] {
    return Region(vector_from_json(j.at("lower"), "region lower"),
                  vector_from_json(j.at("upper"), "region upper"));
  });
}

json region_to_json(const Region& r) {
  return json{{"lower", to_json(r.lower)}, {"upper", to_json(r.upper)}};
}

std::vector<Region> parse_regions(const json& j) {
  return guarded("queries", [&] {
    std::vector<Region> regions;
    for (const auto& jr : j.at("regions")) regions.push_back(region_from_json(jr));
    return regions;
  });
}

std::vector<Region> load_regions(const std::string& path) {
  return parse_regions(load_json_file(path));
}

json to_json(const dist::DistAbstraction& a) {
  return std::visit(
      [](const auto& value) -> json {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, dist::PolynomialAbstraction>) {
          return json{{"type", "polynomial"},
                      {"degree", value.degree},
                      {"coefficients", to_json(value.coefficients)}};
        } else if constexpr (std::is_same_v<T, dist::RbfAbstraction>) {
          return json{{"type", "rbf"},
                      {"kernel", dist::to_string(value.kernel.kind)},
                      {"sigma", value.kernel.sigma},
                      {"centers", to_json(value.centers)},
                      {"coefficients", to_json(value.coefficients)},
                      {"center_values", to_json(value.center_values)}};
        } else {
          return json{{"type", "composed"},
                      {"inverse",
                       {{"weight", to_json(value.inverse.weight)},
                        {"bias", to_json(value.inverse.bias)}}},
                      {"scale", value.scale},
                      {"inner", to_json(*value.inner)}};
        }
      },
      a.value);
}

json to_json(const dist::FourierAbstraction& a) {
  json terms = json::array();
  for (const auto& term : a.terms) {
    terms.push_back({{"amplitude", term.amplitude},
                     {"center", to_json(term.center)},
                     {"width", term.width}});
  }
  return json{{"type", "fourier"}, {"terms", std::move(terms)}};
}

json to_json(const cluster::CentroidAbstraction& a) {
  return json{{"type", "centroids"},
              {"centroids", to_json(a.centroids)},
              {"masses", to_json(a.masses)}};
}

json to_json(const cluster::GmmAbstraction& a) {
  json components = json::array();
  for (const auto& comp : a.components) {
    components.push_back({{"w", comp.weight},
                          {"mu", to_json(comp.mean)},
                          {"sigma", to_json(comp.covariance)}});
  }
  return json{{"type", "gmm"},
              {"components", std::move(components)},
              {"masses", to_json(a.masses)}};
}

dist::DistAbstraction dist_abstraction_from_json(const json& j) {
  return guarded("abstraction", [&]() -> dist::DistAbstraction {
    const std::string type = j.at("type").get<std::string>();
    if (type == "polynomial") {
      return dist::DistAbstraction{dist::PolynomialAbstraction(
          j.at("degree").get<int>(),
          vector_from_json(j.at("coefficients"), "coefficients"))};
    }
    if (type == "rbf") {
      dist::RbfKernel kernel(
          dist::rbf_kernel_from_string(j.at("kernel").get<std::string>()),
          j.at("sigma").get<double>());
      return dist::DistAbstraction{dist::RbfAbstraction(
          kernel, matrix_from_json(j.at("centers"), "centers"),
          vector_from_json(j.at("coefficients"), "coefficients"),
          vector_from_json(j.at("center_values"), "center_values"))};
    }
    if (type == "composed") {
      dist::ComposedAbstraction composed;
      composed.inverse =
          AffineLayer(matrix_from_json(j.at("inverse").at("weight"), "weight"),
                      vector_from_json(j.at("inverse").at("bias"), "bias"));
      composed.scale = j.at("scale").get<double>();
      composed.inner = std::make_shared<const dist::DistAbstraction>(
          dist_abstraction_from_json(j.at("inner")));
      return dist::DistAbstraction{std::move(composed)};
    }
    throw ValidationError("unknown distribution abstraction type '" + type +
                          "'");
  });
}

dist::FourierAbstraction fourier_from_json(const json& j) {
  return guarded("fourier abstraction", [&] {
    dist::FourierAbstraction out;
    for (const auto& jt : j.at("terms")) {
      dist::FourierTerm term;
      term.amplitude = jt.at("amplitude").get<double>();
      term.center = vector_from_json(jt.at("center"), "term center");
      term.width = jt.at("width").get<double>();
      if (!(term.width > 0.0))
        throw ValidationError("term width must be positive");
      out.terms.push_back(std::move(term));
    }
    return out;
  });
}

cluster::CentroidAbstraction centroids_from_json(const json& j) {
  return guarded("centroid abstraction", [&] {
    cluster::CentroidAbstraction out;
    out.centroids = matrix_from_json(j.at("centroids"), "centroids");
    out.masses = vector_from_json(j.at("masses"), "masses");
    if (out.masses.size() != out.centroids.rows())
      throw ValidationError("centroid and mass counts differ");
    return out;
  });
}

cluster::GmmAbstraction gmm_from_json(const json& j) {
  return guarded("gmm abstraction", [&] {
    cluster::GmmAbstraction out;
    for (const auto& jc : j.at("components")) {
      cluster::GmmComponent comp;
      comp.weight = jc.at("w").get<double>();
      comp.mean = vector_from_json(jc.at("mu"), "component mean");
      comp.covariance = matrix_from_json(jc.at("sigma"), "component covariance");
      out.components.push_back(std::move(comp));
    }
    out.masses = vector_from_json(j.at("masses"), "masses");
    if (out.masses.size() != static_cast<Eigen::Index>(out.components.size()))
      throw ValidationError("component and mass counts differ");
    return out;
  });
}

MatrixXd load_centroids_file(const std::string& path) {
  return matrix_from_json(load_json_file(path), "initial centroids");
}

}  // namespace pai::io
