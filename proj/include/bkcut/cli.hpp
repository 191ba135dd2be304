#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bkcut/balance.hpp"
#include "bkcut/graph.hpp"
#include "bkcut/partitioner.hpp"

namespace bkcut {

struct Dataset {
  Points points;
  // Ground-truth classes remapped to 0..c-1 (sorted by original value).
  std::optional<std::vector<int>> labels;
  std::vector<std::string> class_names;
};

// CSV or TSV (delimiter detected from the first data line: tab, comma, or
// whitespace). A first line with a non-numeric field is treated as a header.
// With label_column the last field of every row is the class label.
// Parse errors carry "<source>:<line>:".
Dataset read_points(std::istream& in, bool label_column, const std::string& source = "input");
Dataset read_points_file(const std::filesystem::path& path, bool label_column);

// Column-wise z-score; constant columns become 0.
void standardize(Points& points);

// Percentage of vertices misassigned under the best one-to-one matching of
// clusters to classes (Hungarian method).
double clustering_error(const Partition& pred, const std::vector<int>& truth);

// Minimum-cost perfect assignment on a square cost matrix; returns the
// column assigned to each row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

enum class InputFormat { Points, Edges };

struct ExperimentConfig {
  std::filesystem::path input;
  InputFormat format = InputFormat::Points;
  bool label_column = false;
  // Optional ground truth for edge-list input: one integer per line.
  std::filesystem::path truth_file;
  bool standardize = true;
  int knn = 15;
  double scale = 1.0;
  int k = 0;
  BalanceKind balance = BalanceKind::RatioCheegerAsym;
  int n_random = 5;
  int n_spectral = 7;
  std::uint64_t seed = 0;
  // 0 disables; otherwise labels per class sampled from the ground truth.
  int labels_per_class = 0;
  // > 0 samples this percentage of labels per class instead.
  double label_percent = 0.0;
  bool simplex_only = false;
  double eps = 1e-4;
  double inner_tol = 1e-6;
  long inner_max_iter = 50000;
  int threads = 1;
  std::filesystem::path out_dir = ".";
  bool write_residuals = false;
  bool verbose = false;
};

struct RunResult {
  SolveReport report;
  std::vector<std::string> warnings;
  std::optional<double> error_percent;
  double seconds = 0.0;
};

// Validates the config, builds or loads the graph, solves and writes
// assignment.tsv, report.json and (optionally) residuals.csv into out_dir.
// Progress and warnings go to `log`.
RunResult run(const ExperimentConfig& config, std::ostream& log);

// Reads "i<TAB>c" lines as written by run().
std::vector<int> read_assignment(std::istream& in);

}  // namespace bkcut
