#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "bkcut/cli.hpp"
#include "bkcut/error.hpp"

int main(int argc, char** argv) {
  using namespace bkcut;
  ExperimentConfig cfg;
  std::string balance = "rcc-asym";
  std::string format = "points";
  bool no_standardize = false;

  CLI::App app{"Balanced k-cut clustering via a tight continuous relaxation"};
  app.add_option("--input", cfg.input, "Point file (CSV/TSV) or edge list \"i j w\"")->required();
  app.add_option("--format", format, "Input format")->check(CLI::IsMember({"points", "edges"}));
  app.add_option("--k", cfg.k, "Number of clusters")->required();
  app.add_option("--balance", balance,
                 "Balancing function: rcut, ncut, rcc-sym, rcc-asym, ncc-sym, ncc-asym");
  app.add_flag("--label-column", cfg.label_column, "Last column of the point file holds ground-truth classes");
  app.add_option("--truth", cfg.truth_file, "Ground-truth classes for edge-list input, one per line");
  app.add_option("--knn", cfg.knn, "Neighbors in the k-NN graph");
  app.add_option("--scale", cfg.scale, "Gaussian weight scale s");
  app.add_flag("--no-standardize", no_standardize, "Use raw features instead of per-column z-scores");
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--random-inits", cfg.n_random, "Random initializations");
  app.add_option("--spectral-inits", cfg.n_spectral, "Spectral initializations");
  app.add_option("--labels-per-class", cfg.labels_per_class, "Ground-truth labels sampled per class");
  app.add_option("--label-percent", cfg.label_percent, "Percentage of ground-truth labels sampled per class");
  app.add_flag("--simplex-only", cfg.simplex_only,
               "Diagnostic: descend without size and membership constraints");
  app.add_option("--eps", cfg.eps, "Relative decrease below which the simplex-only descent stops");
  app.add_option("--inner-tol", cfg.inner_tol, "Inner LP residual tolerance");
  app.add_option("--inner-max-iter", cfg.inner_max_iter, "Inner LP iteration cap");
  app.add_option("--threads", cfg.threads, "Initializations solved concurrently");
  app.add_option("--out-dir", cfg.out_dir, "Directory for assignment.tsv and report.json");
  app.add_flag("--residuals", cfg.write_residuals, "Also write residuals.csv");
  app.add_flag("-v,--verbose", cfg.verbose, "Per-initialization progress");

  CLI11_PARSE(app, argc, argv);
  cfg.standardize = !no_standardize;
  cfg.format = format == "edges" ? InputFormat::Edges : InputFormat::Points;
  try {
    cfg.balance = parse_balance_kind(balance);
    const RunResult r = run(cfg, std::cerr);
    return r.report.success ? 0 : 3;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
