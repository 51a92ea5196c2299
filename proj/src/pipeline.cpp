#include "pai/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <variant>

#include "pai/cluster.hpp"
#include "pai/core.hpp"
#include "pai/kernels.hpp"
#include "pai/log.hpp"
#include "pai/oracle.hpp"
#include "pai/quadrature.hpp"
#include "pai/rng.hpp"
#include "pai/version.hpp"

namespace pai::cli {

namespace {

enum class Domain { polynomial, rbf, fourier, kmeans, gmm };

Domain domain_from_string(const std::string& name) {
  if (name == "polynomial") return Domain::polynomial;
  if (name == "rbf") return Domain::rbf;
  if (name == "fourier") return Domain::fourier;
  if (name == "kmeans") return Domain::kmeans;
  if (name == "gmm") return Domain::gmm;
  throw ValidationError("unknown domain '" + name +
                        "' (expected polynomial|rbf|fourier|kmeans|gmm)");
}

using StageAbstraction =
    std::variant<dist::DistAbstraction, dist::FourierAbstraction,
                 cluster::CentroidAbstraction, cluster::GmmAbstraction>;

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

bool is_distribution(const StageAbstraction& stage) {
  return std::holds_alternative<dist::DistAbstraction>(stage) ||
         std::holds_alternative<dist::FourierAbstraction>(stage);
}

WeightedPointSet materialize_input(const PipelineConfig& cfg,
                                   const io::DistributionInput& din) {
  WeightedPointSet input =
      din.points ? *din.points
                 : sample_zonotope(*din.zonotope,
                                   din.samples.value_or(cfg.zonotope_samples),
                                   din.seed.value_or(cfg.seed));
  return cfg.normalize ? input.normalized() : input;
}

cluster::EmConfig make_em_config(const PipelineConfig& cfg) {
  cluster::EmConfig em;
  em.k = cfg.k;
  em.max_iters = cfg.max_iters;
  em.tol = cfg.tol;
  em.seed = cfg.seed;
  em.init = cluster::init_from_string(cfg.init);
  em.weighted_means = cfg.weighted_kmeans;
  if (em.init == cluster::InitKind::given) {
    if (cfg.init_centroids_file.empty())
      throw ValidationError("init 'given' requires --init-centroids");
    em.given_centroids = io::load_centroids_file(cfg.init_centroids_file);
  }
  return em;
}

Bracket data_bracket(const WeightedPointSet& input) {
  return Bracket{input.points.col(0).minCoeff(), input.points.col(0).maxCoeff()};
}

/// Plot/integration window: the data range widened to cover every gaussian
/// bump out to eight widths.
Bracket rbf_bracket(Bracket b, const dist::RbfAbstraction& rbf) {
  const double reach = 8.0 * rbf.kernel.sigma;
  for (Eigen::Index i = 0; i < rbf.centers.rows(); ++i) {
    b.lo = std::min(b.lo, rbf.centers(i, 0) - reach);
    b.hi = std::max(b.hi, rbf.centers(i, 0) + reach);
  }
  return b;
}

Bracket map_bracket(const Bracket& b, const AffineLayer& layer) {
  const double a = layer.weight(0, 0);
  const double c = layer.bias[0];
  const double x = a * b.lo + c;
  const double y = a * b.hi + c;
  return Bracket{std::min(x, y), std::max(x, y)};
}

const AffineLayer& require_scalar_affine(const Layer& layer) {
  const auto* affine = std::get_if<AffineLayer>(&layer);
  if (affine == nullptr)
    throw UnsupportedLayerError(
        "distribution transformers are defined for affine layers only");
  if (affine->in_dim() != 1 || affine->out_dim() != 1)
    throw DimensionError("distribution pipelines require scalar layers");
  return *affine;
}

double stage_total_mass(const StageAbstraction& stage, const Bracket& bracket) {
  return std::visit(
      [&bracket](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, dist::DistAbstraction>) {
          return dist::integrate_distribution(a, bracket.lo, bracket.hi);
        } else if constexpr (std::is_same_v<T, dist::FourierAbstraction>) {
          return dist::integrate_fourier(a, bracket.lo, bracket.hi);
        } else {
          return a.masses.sum();
        }
      },
      stage);
}

double stage_region_mass(const StageAbstraction& stage, const Region& r,
                         bool normalize, const Bracket& bracket) {
  return std::visit(
      [&](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, dist::DistAbstraction>) {
          if (r.dim() != 1)
            throw DimensionError("distribution queries are one-dimensional");
          double mass = dist::integrate_distribution(a, r.lower[0], r.upper[0]);
          if (normalize)
            mass /= dist::integrate_distribution(a, bracket.lo, bracket.hi);
          return mass;
        } else if constexpr (std::is_same_v<T, dist::FourierAbstraction>) {
          if (r.dim() != 1)
            throw DimensionError("distribution queries are one-dimensional");
          double mass = dist::integrate_fourier(a, r.lower[0], r.upper[0]);
          if (normalize)
            mass /= dist::integrate_fourier(a, bracket.lo, bracket.hi);
          return mass;
        } else {
          return cluster::region_mass_abstract(a, r);
        }
      },
      stage);
}

io::json stage_abstraction_json(const StageAbstraction& stage) {
  return std::visit([](const auto& a) { return io::to_json(a); }, stage);
}

StageAbstraction transform_stage(const StageAbstraction& stage,
                                 const Network& net, std::size_t layer_index,
                                 const PipelineConfig& cfg) {
  const Layer& layer = net.layers[layer_index];
  if (const auto* d = std::get_if<dist::DistAbstraction>(&stage)) {
    return dist::transform_distribution(*d, require_scalar_affine(layer),
                                        cfg.jacobian_correction);
  }
  if (const auto* f = std::get_if<dist::FourierAbstraction>(&stage)) {
    return dist::transform_fourier(*f, require_scalar_affine(layer),
                                   cfg.jacobian_correction);
  }
  if (const auto* c = std::get_if<cluster::CentroidAbstraction>(&stage)) {
    return cluster::transform_centroids(*c, net.slice(layer_index));
  }
  return cluster::transform_gmm(std::get<cluster::GmmAbstraction>(stage),
                                layer);
}

std::string layer_label(const Layer& layer) {
  if (std::holds_alternative<AffineLayer>(layer)) return "affine";
  return "activation:" +
         to_string(std::get<ActivationLayer>(layer).kind);
}

io::json config_echo(const PipelineConfig& cfg, const std::string& network_file,
                     const std::string& dist_file,
                     const std::string& queries_file) {
  return io::json{{"domain", cfg.domain},
                  {"degree", cfg.degree},
                  {"n_centers", cfg.n_centers},
                  {"kernel", cfg.kernel},
                  {"sigma", cfg.sigma},
                  {"k", cfg.k},
                  {"max_iters", cfg.max_iters},
                  {"tol", cfg.tol},
                  {"init", cfg.init},
                  {"init_centroids", cfg.init_centroids_file},
                  {"weighted_kmeans", cfg.weighted_kmeans},
                  {"normalize", cfg.normalize},
                  {"jacobian_correction", cfg.jacobian_correction},
                  {"oracle_samples", cfg.oracle_samples},
                  {"zonotope_samples", cfg.zonotope_samples},
                  {"seed", cfg.seed},
                  {"bins", cfg.bins},
                  {"threads", cfg.threads},
                  {"network_file", network_file},
                  {"dist_file", dist_file},
                  {"queries_file", queries_file}};
}

/// Builds a stage's report entry: abstraction snapshot, total mass, bracket
/// (distribution domains), and query answers.
io::json stage_json(int index, const std::string& label,
                    const StageAbstraction& stage, const Bracket& bracket,
                    const std::vector<Region>& regions,
                    const PipelineConfig& cfg) {
  io::json entry{{"index", index},
                 {"layer", label},
                 {"abstraction", stage_abstraction_json(stage)},
                 {"total_mass", stage_total_mass(stage, bracket)}};
  if (is_distribution(stage))
    entry["bracket"] = io::json{bracket.lo, bracket.hi};
  io::json queries = io::json::array();
  for (const Region& r : regions) {
    queries.push_back(
        {{"region", io::region_to_json(r)},
         {"mass", stage_region_mass(stage, r, cfg.normalize, bracket)}});
  }
  entry["queries"] = std::move(queries);
  return entry;
}

}  // namespace

io::json run_pipeline(const PipelineConfig& cfg, const std::string& network_file,
                      const std::string& dist_file,
                      const std::string& queries_file) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.threads > 0) kernels::set_thread_count(cfg.threads);
  const Domain domain = domain_from_string(cfg.domain);

  const Network net = io::load_network(network_file);
  const io::DistributionInput din = io::load_distribution(dist_file);
  const WeightedPointSet input = materialize_input(cfg, din);
  const std::vector<Region> regions =
      queries_file.empty() ? std::vector<Region>{} : io::load_regions(queries_file);
  log::info("loaded network with " + std::to_string(net.size()) +
            " layers and " + std::to_string(input.count()) + " input points");

  // Stage 0: abstraction of the input distribution.
  StageAbstraction stage = [&]() -> StageAbstraction {
    switch (domain) {
      case Domain::polynomial:
        return dist::DistAbstraction{dist::fit_polynomial(input, cfg.degree)};
      case Domain::rbf: {
        const dist::RbfKernel kernel(dist::rbf_kernel_from_string(cfg.kernel),
                                     cfg.sigma);
        return dist::DistAbstraction{
            dist::fit_rbf_exhaustive(input, cfg.n_centers, kernel)};
      }
      case Domain::fourier: {
        const dist::RbfKernel kernel(dist::rbf_kernel_from_string(cfg.kernel),
                                     cfg.sigma);
        return dist::fourier_of_rbf(
            dist::fit_rbf_exhaustive(input, cfg.n_centers, kernel));
      }
      case Domain::kmeans:
        return cluster::kmeans_fit(input, make_em_config(cfg));
      case Domain::gmm:
        return cluster::gmm_fit(input, make_em_config(cfg));
    }
    throw StateError("unreachable domain");
  }();

  Bracket bracket;
  if (is_distribution(stage)) {
    bracket = data_bracket(input);
    if (domain == Domain::rbf)
      bracket = rbf_bracket(bracket, std::get<dist::RbfAbstraction>(
                                         std::get<dist::DistAbstraction>(stage)
                                             .value));
    if (domain == Domain::fourier) {
      // Same window as the underlying RBF: widen to cover every term.
      for (const auto& term :
           std::get<dist::FourierAbstraction>(stage).terms) {
        bracket.lo = std::min(bracket.lo, term.center[0] - 8.0 * term.width);
        bracket.hi = std::max(bracket.hi, term.center[0] + 8.0 * term.width);
      }
    }
  }

  io::json jstages = io::json::array();
  jstages.push_back(stage_json(0, "input", stage, bracket, regions, cfg));
  for (std::size_t i = 0; i < net.size(); ++i) {
    stage = transform_stage(stage, net, i, cfg);
    if (is_distribution(stage))
      bracket = map_bracket(bracket,
                            std::get<AffineLayer>(net.layers[i]));
    jstages.push_back(stage_json(static_cast<int>(i) + 1,
                                 layer_label(net.layers[i]), stage, bracket,
                                 regions, cfg));
    log::debug("transformed through layer " + std::to_string(i));
  }

  // Monte Carlo comparison against the final stage.
  io::json joracle = nullptr;
  if (cfg.oracle_samples > 0) {
    WeightedPointSet oracle_input =
        din.points ? *din.points
                   : sample_zonotope(*din.zonotope, cfg.oracle_samples,
                                     derive_seed(din.seed.value_or(cfg.seed),
                                                 Stream::oracle));
    if (cfg.normalize) oracle_input = oracle_input.normalized();
    const auto empirical = oracle::mc_pushforward(net, oracle_input, false);
    const auto grid = oracle::quantile_regions(empirical.output, cfg.bins);
    const auto comparison = oracle::compare_region_masses(
        empirical,
        [&](const Region& r) {
          return stage_region_mass(stage, r, cfg.normalize, bracket);
        },
        grid);
    io::json entries = io::json::array();
    for (const auto& entry : comparison.entries) {
      entries.push_back({{"region", io::region_to_json(entry.region)},
                         {"empirical", entry.empirical},
                         {"abstract", entry.abstract_mass},
                         {"abs_error", entry.abs_error}});
    }
    joracle = io::json{{"samples", oracle_input.count()},
                       {"regions", std::move(entries)},
                       {"max_error", comparison.max_error},
                       {"mean_error", comparison.mean_error}};
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return io::json{{"format", 1},
                  {"version", kVersion},
                  {"config", config_echo(cfg, network_file, dist_file,
                                         queries_file)},
                  {"stages", std::move(jstages)},
                  {"oracle", std::move(joracle)},
                  {"timing_seconds", seconds}};
}

namespace {

/// Rehydrates one stage entry of a saved report.
StageAbstraction stage_from_json(const io::json& jstage) {
  const auto& jabst = jstage.at("abstraction");
  const std::string type = jabst.at("type").get<std::string>();
  if (type == "polynomial" || type == "rbf" || type == "composed")
    return io::dist_abstraction_from_json(jabst);
  if (type == "fourier") return io::fourier_from_json(jabst);
  if (type == "centroids") return io::centroids_from_json(jabst);
  if (type == "gmm") return io::gmm_from_json(jabst);
  throw ValidationError("unknown abstraction type '" + type + "' in report");
}

Bracket bracket_from_json(const io::json& jstage) {
  Bracket bracket;
  if (jstage.contains("bracket")) {
    bracket.lo = jstage.at("bracket").at(0).get<double>();
    bracket.hi = jstage.at("bracket").at(1).get<double>();
  }
  return bracket;
}

}  // namespace

io::json query_report(const io::json& report, const std::vector<Region>& regions) {
  try {
    const bool normalize =
        report.at("config").at("normalize").get<bool>();
    io::json jstages = io::json::array();
    for (const auto& jstage : report.at("stages")) {
      const StageAbstraction stage = stage_from_json(jstage);
      const Bracket bracket = bracket_from_json(jstage);
      io::json queries = io::json::array();
      for (const Region& r : regions) {
        queries.push_back(
            {{"region", io::region_to_json(r)},
             {"mass", stage_region_mass(stage, r, normalize, bracket)}});
      }
      jstages.push_back({{"index", jstage.at("index")},
                         {"queries", std::move(queries)}});
    }
    return io::json{{"format", 1}, {"stages", std::move(jstages)}};
  } catch (const io::json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

std::string plot_data_csv(const io::json& report, int stage_index) {
  try {
    const auto& jstages = report.at("stages");
    if (stage_index < 0 ||
        stage_index >= static_cast<int>(jstages.size()))
      throw IndexError("stage " + std::to_string(stage_index) +
                       " out of range for " + std::to_string(jstages.size()) +
                       " stages");
    const auto& jstage = jstages.at(static_cast<std::size_t>(stage_index));
    const StageAbstraction stage = stage_from_json(jstage);
    const Bracket bracket = bracket_from_json(jstage);

    char line[96];
    std::string csv;
    if (is_distribution(stage)) {
      constexpr int kSamples = 201;
      csv = "x,density\n";
      for (int i = 0; i < kSamples; ++i) {
        const double x = bracket.lo + (bracket.hi - bracket.lo) *
                                          static_cast<double>(i) /
                                          (kSamples - 1);
        const double y =
            std::holds_alternative<dist::FourierAbstraction>(stage)
                ? dist::fourier_density(
                      std::get<dist::FourierAbstraction>(stage), x)
                : dist::eval_distribution(
                      std::get<dist::DistAbstraction>(stage), x);
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", x, y);
        csv += line;
      }
      return csv;
    }

    MatrixXd locations;
    VectorXd masses;
    if (const auto* c = std::get_if<cluster::CentroidAbstraction>(&stage)) {
      locations = c->centroids;
      masses = c->masses;
    } else {
      const auto& g = std::get<cluster::GmmAbstraction>(stage);
      locations.resize(static_cast<Eigen::Index>(g.components.size()),
                       g.components.front().mean.size());
      for (std::size_t i = 0; i < g.components.size(); ++i)
        locations.row(static_cast<Eigen::Index>(i)) =
            g.components[i].mean.transpose();
      masses = g.masses;
    }
    if (locations.cols() >= 2) {
      csv = "x,y,mass\n";
      for (Eigen::Index i = 0; i < locations.rows(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n",
                      locations(i, 0), locations(i, 1), masses[i]);
        csv += line;
      }
    } else {
      csv = "x,mass\n";
      for (Eigen::Index i = 0; i < locations.rows(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", locations(i, 0),
                      masses[i]);
        csv += line;
      }
    }
    return csv;
  } catch (const io::json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

io::json oracle_run(const PipelineConfig& cfg, const std::string& network_file,
                    const std::string& dist_file,
                    const std::string& queries_file) {
  if (cfg.threads > 0) kernels::set_thread_count(cfg.threads);
  const Network net = io::load_network(network_file);
  const io::DistributionInput din = io::load_distribution(dist_file);
  PipelineConfig materialize_cfg = cfg;
  if (cfg.oracle_samples > 0) materialize_cfg.zonotope_samples = cfg.oracle_samples;
  const WeightedPointSet input = materialize_input(materialize_cfg, din);
  const std::vector<Region> regions =
      queries_file.empty() ? std::vector<Region>{} : io::load_regions(queries_file);

  const auto empirical = oracle::mc_pushforward(net, input, true);

  const auto stage_entry = [&](int index, const WeightedPointSet& pts) {
    const double total = pts.total_weight();
    const VectorXd mean = pts.points.transpose() * pts.weights / total;
    io::json queries = io::json::array();
    for (const Region& r : regions) {
      queries.push_back({{"region", io::region_to_json(r)},
                         {"mass", region_mass_points(pts, r)}});
    }
    return io::json{{"index", index},
                    {"mean", io::to_json(mean)},
                    {"total_weight", total},
                    {"queries", std::move(queries)}};
  };

  io::json jstages = io::json::array();
  jstages.push_back(stage_entry(0, empirical.input));
  for (std::size_t i = 0; i < empirical.per_layer.size(); ++i)
    jstages.push_back(
        stage_entry(static_cast<int>(i) + 1, empirical.per_layer[i]));

  // Quantile-bin masses of the final stage, for distribution-shape checks.
  io::json bins = io::json::array();
  for (const Region& r : oracle::quantile_regions(empirical.output, cfg.bins)) {
    bins.push_back({{"region", io::region_to_json(r)},
                    {"mass", region_mass_points(empirical.output, r)}});
  }

  return io::json{{"format", 1},
                  {"version", kVersion},
                  {"samples", input.count()},
                  {"stages", std::move(jstages)},
                  {"bins", std::move(bins)}};
}

}  // namespace pai::cli
