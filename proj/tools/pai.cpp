#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pai/errors.hpp"
#include "pai/io.hpp"
#include "pai/pipeline.hpp"
#include "pai/version.hpp"

namespace {

void emit_json(const pai::io::json& j, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  pai::io::write_json_file(out_file, j);
}

void emit_text(const std::string& text, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw pai::ValidationError("cannot open '" + out_file + "' for writing");
  out << text;
}

void add_io_options(CLI::App* cmd, std::string& network_file,
                    std::string& dist_file, std::string& queries_file,
                    std::string& out_file) {
  cmd->add_option("--network", network_file, "Network JSON file")->required();
  cmd->add_option("--dist", dist_file, "Input distribution JSON file")
      ->required();
  cmd->add_option("--queries", queries_file,
                  "Region queries JSON file (optional)");
  cmd->add_option("--out", out_file, "Report path (default: stdout)");
}

void add_sampling_options(CLI::App* cmd, pai::cli::PipelineConfig& cfg) {
  cmd->add_option("--oracle-samples", cfg.oracle_samples,
                  "Monte Carlo sample count (0 disables the comparison)");
  cmd->add_option("--zonotope-samples", cfg.zonotope_samples,
                  "Samples drawn from a zonotope distribution file");
  cmd->add_option("--seed", cfg.seed, "Master RNG seed");
  cmd->add_option("--bins", cfg.bins, "Quantile bins per axis for oracle regions");
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = OpenMP default)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic abstract interpretation of feedforward networks"};
  app.set_version_flag("--version", pai::kVersion);
  app.require_subcommand(1);

  pai::cli::PipelineConfig cfg;
  std::string network_file;
  std::string dist_file;
  std::string queries_file;
  std::string out_file;
  std::string report_file;
  int stage = 0;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Fit an abstraction and push it through the network");
  add_io_options(analyze, network_file, dist_file, queries_file, out_file);
  analyze->add_option("--domain", cfg.domain,
                      "Abstract domain: polynomial|rbf|fourier|kmeans|gmm")
      ->required();
  analyze->add_option("--degree", cfg.degree, "Polynomial degree");
  analyze->add_option("--n-centers", cfg.n_centers, "RBF center count");
  analyze->add_option("--kernel", cfg.kernel,
                      "RBF kernel: gaussian|multiquadric|inverse_multiquadric|"
                      "thin_plate_spline");
  analyze->add_option("--sigma", cfg.sigma, "RBF kernel width");
  analyze->add_option("--k", cfg.k, "Cluster / mixture component count");
  analyze->add_option("--max-iters", cfg.max_iters,
                      "Iteration cap (0 = score the initialization only)");
  analyze->add_option("--tol", cfg.tol, "Convergence tolerance");
  analyze->add_option("--init", cfg.init,
                      "Initialization: random_points|kmeans_plus_plus|given");
  analyze->add_option("--init-centroids", cfg.init_centroids_file,
                      "JSON file with initial centroids (init=given)");
  analyze->add_flag("--weighted-kmeans", cfg.weighted_kmeans,
                    "Weigh points by probability in centroid updates");
  analyze->add_flag("--normalize", cfg.normalize,
                    "Normalize input weights (and reported densities) to unit mass");
  analyze->add_flag("--jacobian-correction", cfg.jacobian_correction,
                    "Multiply transformed densities by |det f^-1|");
  add_sampling_options(analyze, cfg);

  CLI::App* query = app.add_subcommand(
      "query", "Re-answer region queries against a saved report");
  query->add_option("--report", report_file, "Report JSON file")->required();
  query->add_option("--queries", queries_file, "Region queries JSON file")
      ->required();
  query->add_option("--out", out_file, "Output path (default: stdout)");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Monte Carlo pushforward without any abstraction");
  add_io_options(oracle, network_file, dist_file, queries_file, out_file);
  add_sampling_options(oracle, cfg);

  CLI::App* plot = app.add_subcommand(
      "plot-data", "Emit CSV plot data for one stage of a report");
  plot->add_option("--report", report_file, "Report JSON file")->required();
  plot->add_option("--stage", stage, "Stage index (0 = input)")->required();
  plot->add_option("--out", out_file, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) {
      emit_json(pai::cli::run_pipeline(cfg, network_file, dist_file, queries_file),
                out_file);
    } else if (query->parsed()) {
      const auto report = pai::io::load_json_file(report_file);
      const auto regions = pai::io::load_regions(queries_file);
      emit_json(pai::cli::query_report(report, regions), out_file);
    } else if (oracle->parsed()) {
      emit_json(pai::cli::oracle_run(cfg, network_file, dist_file, queries_file),
                out_file);
    } else if (plot->parsed()) {
      const auto report = pai::io::load_json_file(report_file);
      emit_text(pai::cli::plot_data_csv(report, stage), out_file);
    }
    return 0;
  } catch (const pai::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pai::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
