#include "bkcut/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "bkcut/error.hpp"
#include "json.hpp"

namespace bkcut {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, delim)) out.push_back(trim(cur));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::string where(const std::string& source, long line) { return source + ":" + std::to_string(line) + ": "; }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Dataset read_points(std::istream& in, bool label_column, const std::string& source) {
  Dataset out;
  std::vector<std::string> raw_labels;
  std::string line;
  long lineno = 0;
  char delim = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (delim == 0) delim = t.find('\t') != std::string::npos ? '\t' : t.find(',') != std::string::npos ? ',' : ' ';
    auto fields = split(t, delim);
    const std::size_t n_features = label_column ? fields.size() - 1 : fields.size();
    if (label_column && fields.size() < 2)
      throw InvalidInput(where(source, lineno) + "expected at least one feature and a label");

    std::vector<double> row;
    bool numeric = true;
    for (std::size_t j = 0; j < n_features && numeric; ++j) {
      const auto v = parse_number(fields[j]);
      if (!v) {
        numeric = false;
      } else {
        row.push_back(*v);
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw InvalidInput(where(source, lineno) + "non-numeric field '" + fields[row.size()] + "'");
    }
    first = false;
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw InvalidInput(where(source, lineno) + "expected " + std::to_string(width) + " fields, found " +
                         std::to_string(fields.size()));
    for (double v : row)
      if (!std::isfinite(v)) throw InvalidInput(where(source, lineno) + "non-finite value");
    if (label_column) {
      if (fields.back().empty()) throw InvalidInput(where(source, lineno) + "empty label");
      raw_labels.push_back(fields.back());
    }
    out.points.push_back(std::move(row));
  }
  if (out.points.empty()) throw InvalidInput(source + ": no data rows");

  if (label_column) {
    std::vector<std::string> names = raw_labels;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    const bool all_numeric =
        std::all_of(names.begin(), names.end(), [](const std::string& s) { return parse_number(s).has_value(); });
    if (all_numeric)
      std::sort(names.begin(), names.end(),
                [](const std::string& a, const std::string& b) { return *parse_number(a) < *parse_number(b); });
    std::map<std::string, int> index;
    for (std::size_t c = 0; c < names.size(); ++c) index[names[c]] = static_cast<int>(c);
    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (const auto& s : raw_labels) labels.push_back(index[s]);
    out.labels = std::move(labels);
    out.class_names = std::move(names);
  }
  return out;
}

Dataset read_points_file(const std::filesystem::path& path, bool label_column) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_points(in, label_column, path.string());
}

void standardize(Points& points) {
  if (points.empty()) return;
  const std::size_t d = points[0].size();
  const double n = static_cast<double>(points.size());
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[j];
    mean /= n;
    double var = 0.0;
    for (const auto& p : points) var += (p[j] - mean) * (p[j] - mean);
    const double sd = std::sqrt(var / n);
    for (auto& p : points) p[j] = sd > 0.0 ? (p[j] - mean) / sd : 0.0;
  }
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  // Potentials formulation, 1-based with a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInfinity);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInfinity;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double clustering_error(const Partition& pred, const std::vector<int>& truth) {
  if (pred.assignment.size() != truth.size()) throw InvalidInput("clustering_error: size mismatch");
  if (truth.empty()) return 0.0;
  int classes = 0;
  for (int c : truth) {
    if (c < 0) throw InvalidInput("clustering_error: negative class");
    classes = std::max(classes, c + 1);
  }
  const int size = std::max(pred.k, classes);
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) cost[pred.assignment[i]][truth[i]] -= 1.0;
  const auto match = hungarian(cost);
  double correct = 0.0;
  for (int r = 0; r < size; ++r) correct -= cost[r][match[r]];
  return 100.0 * (static_cast<double>(truth.size()) - correct) / static_cast<double>(truth.size());
}

std::vector<int> read_assignment(std::istream& in) {
  std::vector<int> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    long i = -1;
    int c = -1;
    if (!(ss >> i >> c) || i != static_cast<long>(out.size()) || c < 0)
      throw InvalidInput(where("assignment", lineno) + "expected '<index>\\t<cluster>' in order");
    out.push_back(c);
  }
  return out;
}

namespace {

void validate(const ExperimentConfig& c) {
  if (c.input.empty()) throw InvalidInput("--input is required");
  if (c.k < 2) throw InvalidInput("--k must be at least 2");
  if (c.knn < 1) throw InvalidInput("--knn must be positive");
  if (!(c.scale > 0.0)) throw InvalidInput("--scale must be positive");
  if (c.n_random < 0 || c.n_spectral < 0 || c.n_random + c.n_spectral < 1)
    throw InvalidInput("need at least one initialization");
  if (!(c.eps >= 0.0)) throw InvalidInput("--eps must be non-negative");
  if (!(c.inner_tol > 0.0)) throw InvalidInput("--inner-tol must be positive");
  if (c.inner_max_iter < 1) throw InvalidInput("--inner-max-iter must be positive");
  if (c.threads < 1) throw InvalidInput("--threads must be positive");
  if (c.labels_per_class < 0) throw InvalidInput("--labels-per-class must be non-negative");
  if (c.label_percent < 0.0 || c.label_percent > 100.0) throw InvalidInput("--label-percent must lie in [0, 100]");
  if (c.labels_per_class > 0 && c.label_percent > 0.0)
    throw InvalidInput("--labels-per-class and --label-percent are mutually exclusive");
  if (c.format == InputFormat::Edges && c.label_column)
    throw InvalidInput("--label-column applies to point input only; use --truth for edge lists");
}

std::vector<int> read_truth_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::vector<int> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto v = parse_number(t);
    if (!v || *v < 0 || *v != std::floor(*v))
      throw InvalidInput(where(path.string(), lineno) + "expected a non-negative integer class");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

Json step_json(const StepLog& s) {
  Json j;
  j["outer"] = s.outer;
  j["gamma_before"] = number_or_null(s.gamma_before);
  j["gamma"] = number_or_null(s.gamma);
  j["lambda"] = Json::array();
  for (double x : s.lambda) j["lambda"].push_back(number_or_null(x));
  j["inner_objective"] = number_or_null(s.inner_objective);
  j["inner_iterations"] = s.inner_iterations;
  j["inner_converged"] = s.inner_converged;
  j["inner_tol"] = s.inner_tol;
  j["accepted"] = s.accepted;
  j["early_exit"] = s.early_exit;
  j["inexact"] = s.inexact;
  return j;
}

Json init_json(const InitReport& r) {
  Json j;
  j["index"] = r.index;
  j["kind"] = r.kind;
  j["status"] = r.status;
  if (!r.message.empty()) j["message"] = r.message;
  j["best_bcut"] = number_or_null(r.best_bcut);
  j["final_gamma"] = number_or_null(r.final_gamma);
  j["final_rounding_bcut"] = number_or_null(r.final_rounding.bcut);
  j["weak_degenerate_events"] = r.weak_degenerate_events;
  j["strong_degenerate_events"] = r.strong_degenerate_events;
  j["inexact_termination"] = r.inexact_termination;
  j["gamma"] = Json::array();
  for (double x : r.gamma) j["gamma"].push_back(number_or_null(x));
  j["chi"] = Json::array();
  for (double x : r.chi) j["chi"].push_back(number_or_null(x));
  j["membership"] = Json::array();
  for (const auto& m : r.membership)
    j["membership"].push_back(
        {{"iteration", m.iteration}, {"quota", m.quota}, {"size", m.size}, {"capped", m.capped}, {"improved", m.improved}});
  j["steps"] = Json::array();
  for (const auto& s : r.steps) j["steps"].push_back(step_json(s));
  return j;
}

}  // namespace

RunResult run(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;

  std::optional<Graph> graph;
  std::optional<std::vector<int>> truth;
  if (config.format == InputFormat::Points) {
    Dataset data = read_points_file(config.input, config.label_column);
    truth = data.labels;
    if (config.standardize) standardize(data.points);
    if (static_cast<int>(data.points.size()) <= config.knn)
      throw InvalidInput("--knn must be smaller than the number of points (" + std::to_string(data.points.size()) + ")");
    graph = build_knn_graph(data.points, config.knn, config.scale);
  } else {
    if (!config.truth_file.empty()) truth = read_truth_file(config.truth_file);
    std::ifstream in(config.input);
    if (!in) throw InvalidInput("cannot open " + config.input.string());
    graph = read_edge_list(in, truth ? static_cast<int>(truth->size()) : 0);
    if (truth && static_cast<int>(truth->size()) != graph->num_vertices())
      throw InvalidInput("truth file has " + std::to_string(truth->size()) + " entries, graph has " +
                         std::to_string(graph->num_vertices()) + " vertices");
  }
  const Graph& g = *graph;
  if (config.k > g.num_vertices()) throw InvalidInput("--k exceeds the number of vertices");

  const auto components = connected_components(g);
  if (components.size() > 1) {
    std::string w = "graph is disconnected (" + std::to_string(components.size()) + " components)";
    if (static_cast<int>(components.size()) > config.k)
      w += "; more components than k = " + std::to_string(config.k) + ", zero-cut degenerate solutions exist";
    result.warnings.push_back(w);
  }
  for (const auto& w : result.warnings) log << "warning: " << w << '\n';

  BalanceFunction bf(config.balance, config.k, g);

  std::optional<LabelConstraintSet> seeds;
  if (config.labels_per_class > 0 || config.label_percent > 0.0) {
    if (!truth) throw InvalidInput("label sampling needs ground truth (--label-column or --truth)");
    SeedMode mode;
    if (config.label_percent > 0.0) {
      mode.kind = SeedMode::Percent;
      mode.percent = config.label_percent;
    } else {
      mode.count = config.labels_per_class;
    }
    seeds = transductive_seed(*truth, config.k, mode, config.seed);
  }

  SolveConfig sc;
  sc.n_random = config.n_random;
  sc.n_spectral = config.n_spectral;
  sc.seed = config.seed;
  sc.simplex_only = config.simplex_only;
  sc.threads = config.threads;
  sc.descent.eps = config.eps;
  sc.descent.inner_tol = config.inner_tol;
  sc.descent.inner_max_iter = config.inner_max_iter;
  std::mutex log_mutex;
  if (config.verbose) sc.log = [&log](const std::string& msg) { log << msg << '\n'; };

  std::vector<std::tuple<int, int, ResidualSample>> residuals;
  if (config.write_residuals)
    sc.on_residual = [&](int init, int outer, const ResidualSample& s) {
      std::lock_guard<std::mutex> lock(log_mutex);
      residuals.emplace_back(init, outer, s);
    };

  result.report = solve(g, bf, sc, seeds ? &*seeds : nullptr);
  const SolveReport& rep = result.report;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (truth && rep.best.num_vertices() == g.num_vertices()) result.error_percent = clustering_error(rep.best, *truth);

  std::filesystem::create_directories(config.out_dir);
  if (rep.best.num_vertices() == g.num_vertices()) {
    std::ofstream out(config.out_dir / "assignment.tsv");
    for (int i = 0; i < g.num_vertices(); ++i) out << i << '\t' << rep.best.assignment[i] << '\n';
    if (!out) throw std::runtime_error("failed to write assignment.tsv");
  }

  Json j;
  j["config"] = {{"input", config.input.string()},
                 {"format", config.format == InputFormat::Points ? "points" : "edges"},
                 {"k", config.k},
                 {"balance", std::string(to_string(config.balance))},
                 {"knn", config.knn},
                 {"scale", config.scale},
                 {"standardize", config.standardize},
                 {"seed", config.seed},
                 {"n_random", config.n_random},
                 {"n_spectral", config.n_spectral},
                 {"labels_per_class", config.labels_per_class},
                 {"label_percent", config.label_percent},
                 {"simplex_only", config.simplex_only},
                 {"eps", config.eps},
                 {"inner_tol", config.inner_tol},
                 {"inner_max_iter", config.inner_max_iter}};
  j["graph"] = {{"vertices", g.num_vertices()}, {"edges", g.num_edges()}, {"components", components.size()}};
  j["warnings"] = result.warnings;
  j["success"] = rep.success;
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  j["best_init"] = rep.best_init;
  j["bcut"] = number_or_null(rep.best_bcut);
  j["gamma"] = number_or_null(rep.best_gamma);
  if (result.error_percent) j["error_percent"] = *result.error_percent;
  if (rep.best.num_vertices() == g.num_vertices()) {
    j["cluster_sizes"] = rep.best.sizes();
    Json all;
    for (BalanceKind kind : kAllBalanceKinds) {
      try {
        all[std::string(to_string(kind))] = number_or_null(bcut(g, BalanceFunction(kind, config.k, g), rep.best));
      } catch (const InvalidInput&) {
        all[std::string(to_string(kind))] = nullptr;
      }
    }
    j["bcut_by_balance"] = all;
  }
  if (rep.best_embedding.rows() > 0) {
    j["embedding_distance_to_indicator"] = rep.best_embedding.distance_to_indicator();
    j["best_rounding"] = {{"weak_degenerate", rep.best_rounding.weak_degenerate},
                          {"strong_degenerate", rep.best_rounding.strong_degenerate},
                          {"nonempty_clusters", rep.best_rounding.partition.nonempty_clusters()}};
  }
  if (seeds) {
    j["seed_labels"] = Json::array();
    for (const auto& lc : seeds->labels) j["seed_labels"].push_back({lc.vertex, lc.cluster});
  }
  j["inits"] = Json::array();
  for (const auto& r : rep.inits) j["inits"].push_back(init_json(r));
  j["runtime_seconds"] = result.seconds;
  {
    std::ofstream out(config.out_dir / "report.json");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed to write report.json");
  }

  if (config.write_residuals) {
    std::sort(residuals.begin(), residuals.end(), [](const auto& a, const auto& b) {
      return std::make_tuple(std::get<0>(a), std::get<1>(a), std::get<2>(a).iteration) <
             std::make_tuple(std::get<0>(b), std::get<1>(b), std::get<2>(b).iteration);
    });
    std::ofstream out(config.out_dir / "residuals.csv");
    out << "init,outer,iteration,primal_residual,dual_residual,violation,objective\n";
    out.precision(17);
    for (const auto& [init, outer, s] : residuals)
      out << init << ',' << outer << ',' << s.iteration << ',' << s.primal_residual << ',' << s.dual_residual << ','
          << s.violation << ',' << s.objective << '\n';
  }

  if (rep.success) {
    log << "bcut " << rep.best_bcut;
    if (result.error_percent) log << ", error " << *result.error_percent << "%";
    log << ", best init " << rep.best_init << ", " << result.seconds << " s\n";
  } else {
    log << "failed: " << rep.failure << '\n';
  }
  return result;
}

}  // namespace bkcut
