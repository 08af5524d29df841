// Command-line surface for the projection-ensemble classifier library:
//
//   rpld synth : generate a synthetic dataset (CSV + stats sidecar)
//   rpld sweep : estimate error curves over a d-grid and pick the best d
//   rpld eval  : train at one d, report empirical error and the G-estimate
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O.
// Set RPLD_LOG=info or RPLD_LOG=debug for progress lines on stderr.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "rpld/evaluate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rpld;

namespace {

int log_level() {
  const char* v = std::getenv("RPLD_LOG");
  if (!v) return 0;
  const std::string s(v);
  if (s == "debug") return 2;
  if (s == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[rpld] " << msg << "\n";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::no_sign_change:
    case ErrorCode::non_finite:
    case ErrorCode::max_iterations:
    case ErrorCode::singular_covariance:
    case ErrorCode::singular_projected_covariance:
    case ErrorCode::not_positive_definite:
    case ErrorCode::degenerate_variance:
      return 3;
    case ErrorCode::io_error:
    case ErrorCode::malformed_csv:
    case ErrorCode::non_numeric_feature:
    case ErrorCode::more_than_two_labels:
      return 4;
    default:
      return 2;
  }
}

json stats_to_json(const ClassStats& stats) {
  json j;
  j["p"] = stats.dim();
  j["pi0"] = stats.pi0;
  j["pi1"] = stats.pi1;
  j["mu0"] = std::vector<double>(stats.mu0.data(),
                                 stats.mu0.data() + stats.mu0.size());
  j["mu1"] = std::vector<double>(stats.mu1.data(),
                                 stats.mu1.data() + stats.mu1.size());
  std::vector<double> sigma(stats.sigma.size());
  Eigen::Map<Eigen::MatrixXd>(sigma.data(), stats.sigma.rows(),
                              stats.sigma.cols()) = stats.sigma;
  j["sigma"] = sigma;  // column-major, p*p entries
  return j;
}

ClassStats stats_from_json(const json& j) {
  ClassStats stats;
  const int p = j.at("p").get<int>();
  auto mu0 = j.at("mu0").get<std::vector<double>>();
  auto mu1 = j.at("mu1").get<std::vector<double>>();
  auto sigma = j.at("sigma").get<std::vector<double>>();
  if (static_cast<int>(mu0.size()) != p ||
      static_cast<int>(mu1.size()) != p ||
      static_cast<int>(sigma.size()) != p * p) {
    fail(ErrorCode::malformed_csv, "stats file dimensions are inconsistent");
  }
  stats.mu0 = Eigen::Map<Eigen::VectorXd>(mu0.data(), p);
  stats.mu1 = Eigen::Map<Eigen::VectorXd>(mu1.data(), p);
  stats.sigma = Eigen::Map<Eigen::MatrixXd>(sigma.data(), p, p);
  stats.pi0 = j.at("pi0").get<double>();
  stats.pi1 = j.at("pi1").get<double>();
  stats.validate();
  return stats;
}

ClassStats load_stats_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open stats file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::malformed_csv,
         "stats file " + path + " is not valid JSON: " + e.what());
  }
  return stats_from_json(j);
}

std::string sidecar_path(const std::string& data_path) {
  fs::path p(data_path);
  p.replace_extension(".stats.json");
  return p.string();
}

std::optional<std::pair<double, double>> parse_priors(const std::string& s) {
  if (s == "estimated") return std::nullopt;
  if (s.rfind("known:", 0) == 0) {
    const auto rest = s.substr(6);
    const auto comma = rest.find(',');
    if (comma != std::string::npos) {
      try {
        const double a = std::stod(rest.substr(0, comma));
        const double b = std::stod(rest.substr(comma + 1));
        if (a > 0.0 && b > 0.0 && std::abs(a + b - 1.0) < 1e-9) return {{a, b}};
      } catch (const std::exception&) {
      }
    }
  }
  fail(ErrorCode::bad_dimensions,
       "--priors must be 'estimated' or 'known:<pi0>,<pi1>'");
}

EstimatorKind parse_estimator(const std::string& tok) {
  if (tok == "g") return EstimatorKind::g_estimate;
  if (tok == "cv") return EstimatorKind::cv;
  if (tok == "empirical") return EstimatorKind::empirical;
  if (tok == "de") return EstimatorKind::de_oracle;
  fail(ErrorCode::bad_dimensions,
       "unknown estimator '" + tok + "' (expected g, cv, empirical or de)");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::g_estimate: return "g_estimate";
    case EstimatorKind::de_oracle: return "de_oracle";
    case EstimatorKind::empirical: return "empirical";
    case EstimatorKind::cv: return "cv";
  }
  return "?";
}

void write_number(std::ostream& out, double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  out << ss.str();
}

void write_curve_csv(const TuningResult& result,
                     const std::set<EstimatorKind>& estimators,
                     std::ostream& out) {
  // Column set is exactly the requested estimators plus d, in a fixed order.
  const EstimatorKind order[] = {EstimatorKind::g_estimate,
                                 EstimatorKind::de_oracle,
                                 EstimatorKind::empirical, EstimatorKind::cv};
  out << "d";
  for (auto kind : order) {
    if (estimators.count(kind)) out << ',' << estimator_name(kind);
  }
  out << '\n';
  for (const auto& row : result.rows) {
    out << row.d;
    for (auto kind : order) {
      if (!estimators.count(kind)) continue;
      out << ',';
      write_number(out, *row.get(kind));
    }
    out << '\n';
  }
}

json curve_to_json(const TuningResult& result,
                   const std::set<EstimatorKind>& estimators) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r;
    r["d"] = row.d;
    for (auto kind : {EstimatorKind::g_estimate, EstimatorKind::de_oracle,
                      EstimatorKind::empirical, EstimatorKind::cv}) {
      if (estimators.count(kind)) r[estimator_name(kind)] = *row.get(kind);
    }
    rows.push_back(r);
  }
  json j;
  j["rows"] = rows;
  j["best_d"] = result.best_d;
  j["criterion"] = estimator_name(result.criterion);
  return j;
}


// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string preset;
  std::string stats_file;
  int p = 200;
  int n0 = 200;
  int n1 = 200;
  uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& args) {
  ClassStats stats;
  if (!args.stats_file.empty()) {
    stats = load_stats_file(args.stats_file);
  } else if (args.preset == "spike-cov" || args.preset == "identity-cov") {
    stats = synthetic_preset(args.p, args.preset == "spike-cov"
                                         ? PresetKind::spike_cov
                                         : PresetKind::identity_cov);
  } else {
    fail(ErrorCode::bad_dimensions,
         "--preset must be spike-cov or identity-cov (or use --stats)");
  }
  // Class proportions double as the priors in stratified generation.
  stats.pi0 = double(args.n0) / (args.n0 + args.n1);
  stats.pi1 = double(args.n1) / (args.n0 + args.n1);

  log_info("generating " + std::to_string(args.n0 + args.n1) + " points in p=" +
           std::to_string(stats.dim()));
  const auto data = generate_synthetic(stats, args.n0, args.n1, args.seed);
  save_csv(data, args.out);

  json side = stats_to_json(stats);
  side["generator"] = {{"preset", args.stats_file.empty() ? args.preset
                                                          : "stats-file"},
                       {"seed", args.seed},
                       {"n0", args.n0},
                       {"n1", args.n1}};
  std::ofstream out(sidecar_path(args.out));
  if (!out) fail(ErrorCode::io_error, "cannot write sidecar");
  out << side.dump(2) << '\n';
  std::cout << "wrote " << args.out << " and " << sidecar_path(args.out)
            << "\n";
  return 0;
}

struct SweepArgs {
  std::string data_path;
  std::string stats_file;
  std::string label_column = "label";
  std::string positive_label = "1";
  int d_min = 1;
  int d_max = 0;  // 0: up to rank - 2
  int d_step = 1;
  int M = 100;
  std::string estimators = "g";
  std::string priors = "estimated";
  uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  int test_size = 100'000;
  int cv_folds = 10;
  int cv_repeats = 100;
  std::string criterion = "g";
  bool criterion_set = false;
};

json sweep_config_json(const SweepArgs& args) {
  json j;
  j["data"] = args.data_path;
  j["d_min"] = args.d_min;
  j["d_max"] = args.d_max;
  j["d_step"] = args.d_step;
  j["M"] = args.M;
  j["estimators"] = args.estimators;
  j["priors"] = args.priors;
  j["seed"] = args.seed;
  j["test_size"] = args.test_size;
  j["cv_folds"] = args.cv_folds;
  j["cv_repeats"] = args.cv_repeats;
  return j;
}

int cmd_sweep(const SweepArgs& args) {
  const auto data =
      load_csv(args.data_path, args.label_column, args.positive_label);
  log_info("loaded " + std::to_string(data.size()) + " points, p=" +
           std::to_string(data.dim()));

  std::set<EstimatorKind> kinds;
  std::stringstream ss(args.estimators);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) kinds.insert(parse_estimator(tok));
  }

  SweepConfig cfg;
  cfg.M = args.M;
  cfg.seed = args.seed;
  cfg.known_priors = parse_priors(args.priors);
  cfg.threads = args.threads;
  cfg.test_size = args.test_size;
  cfg.cv_folds = args.cv_folds;
  cfg.cv_repeats = args.cv_repeats;
  cfg.criterion = parse_estimator(args.criterion);
  if (!kinds.count(cfg.criterion) && !args.criterion_set) {
    // Default criterion fell outside the requested set; take the first
    // requested one in preference order instead of erroring out.
    for (auto kind : {EstimatorKind::g_estimate, EstimatorKind::cv,
                      EstimatorKind::empirical, EstimatorKind::de_oracle}) {
      if (kinds.count(kind)) {
        cfg.criterion = kind;
        break;
      }
    }
  }

  const std::string stats_path =
      !args.stats_file.empty() ? args.stats_file : sidecar_path(args.data_path);
  if (fs::exists(stats_path)) {
    cfg.true_stats = load_stats_file(stats_path);
    log_info("population statistics available from " + stats_path);
  }

  // Clamp the grid to what the sample covariance supports.
  const auto sample_stats = estimate_stats(data, cfg.known_priors);
  const int max_d = covariance_rank(sample_stats.sigma, data.size()) - 2;
  int d_hi = args.d_max > 0 ? args.d_max : max_d;
  if (d_hi > max_d) {
    std::cerr << "warning: clipping d-max from " << d_hi << " to rank-2 = "
              << max_d << "\n";
    d_hi = max_d;
  }
  std::vector<int> grid;
  for (int d = std::max(args.d_min, 1); d <= d_hi; d += args.d_step) {
    grid.push_back(d);
  }
  if (grid.empty()) {
    fail(ErrorCode::bad_dimensions, "empty d-grid after clamping");
  }

  const auto result = sweep(data, grid, kinds, cfg);

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) fail(ErrorCode::io_error, "cannot write " + args.out);
    if (args.format == "json") {
      json j = curve_to_json(result, kinds);
      j["config"] = sweep_config_json(args);
      out << j.dump(2) << '\n';
    } else {
      write_curve_csv(result, kinds, out);
    }
  }
  std::cout << "best_d " << result.best_d << " by "
            << estimator_name(result.criterion) << "\n";
  return 0;
}

struct EvalArgs {
  std::string train_path;
  std::string test_path;
  std::string label_column = "label";
  std::string positive_label = "1";
  std::string priors = "estimated";
  int d = 1;
  int M = 100;
  uint64_t seed = 0;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto train =
      load_csv(args.train_path, args.label_column, args.positive_label);
  const auto test =
      load_csv(args.test_path, args.label_column, args.positive_label);
  const auto priors = parse_priors(args.priors);
  const auto stats = estimate_stats(train, priors);

  const auto t1 = clock::now();
  TrainedEnsemble ens(stats, args.d, args.M, args.seed);
  const auto t2 = clock::now();
  const auto err = empirical_error(ens, test);
  const auto g = g_estimate(stats, train.n0, train.n1, args.d);
  const auto t3 = clock::now();

  auto ms = [](auto a, auto b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  json report;
  report["d"] = args.d;
  report["M"] = args.M;
  report["seed"] = args.seed;
  report["empirical_error"] = err.value;
  report["g_estimate"] = g.error;
  report["stats"] = {{"p", stats.dim()},
                     {"n0", train.n0},
                     {"n1", train.n1},
                     {"pi0", stats.pi0},
                     {"pi1", stats.pi1},
                     {"delta_mu_norm", (stats.mu1 - stats.mu0).norm()},
                     {"covariance_rank",
                      covariance_rank(stats.sigma, train.size())}};
  report["timing_ms"] = {{"load", ms(t0, t1)},
                         {"train", ms(t1, t2)},
                         {"evaluate", ms(t2, t3)}};

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) fail(ErrorCode::io_error, "cannot write " + args.out);
    out << report.dump(2) << '\n';
  }
  std::cout << "empirical " << err.value << " g_estimate " << g.error << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomly projected discriminant ensembles"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic data");
  synth_cmd->add_option("--preset", synth.preset,
                        "spike-cov or identity-cov");
  synth_cmd->add_option("--stats", synth.stats_file,
                        "explicit stats JSON instead of a preset");
  synth_cmd->add_option("--p", synth.p, "dimension");
  synth_cmd->add_option("--n0", synth.n0, "class-0 count")->required();
  synth_cmd->add_option("--n1", synth.n1, "class-1 count")->required();
  synth_cmd->add_option("--seed", synth.seed, "RNG seed")->required();
  synth_cmd->add_option("--out", synth.out, "output CSV path")->required();

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "error curves over d");
  sweep_cmd->add_option("--data", sw.data_path, "training CSV")->required();
  sweep_cmd->add_option("--stats", sw.stats_file,
                        "population stats JSON (default: data sidecar)");
  sweep_cmd->add_option("--label-column", sw.label_column, "label column");
  sweep_cmd->add_option("--positive-label", sw.positive_label,
                        "token mapped to class 1");
  sweep_cmd->add_option("--d-min", sw.d_min, "grid start");
  sweep_cmd->add_option("--d-max", sw.d_max, "grid end (default rank-2)");
  sweep_cmd->add_option("--d-step", sw.d_step, "grid step");
  sweep_cmd->add_option("--M", sw.M, "ensemble size");
  sweep_cmd->add_option("--estimators", sw.estimators,
                        "comma list of g,cv,empirical,de");
  sweep_cmd->add_option("--priors", sw.priors,
                        "estimated or known:<pi0>,<pi1>");
  sweep_cmd->add_option("--seed", sw.seed, "RNG seed")->required();
  sweep_cmd->add_option("--out", sw.out, "curve output path");
  sweep_cmd->add_option("--format", sw.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--threads", sw.threads, "worker cap");
  sweep_cmd->add_option("--test-size", sw.test_size,
                        "synthetic test points for the empirical column");
  sweep_cmd->add_option("--cv-folds", sw.cv_folds, "folds per repeat");
  sweep_cmd->add_option("--cv-repeats", sw.cv_repeats, "shuffle repeats");
  sweep_cmd
      ->add_option("--criterion", sw.criterion,
                   "estimator minimized for best_d")
      ->each([&sw](const std::string&) { sw.criterion_set = true; });

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "single-point evaluation");
  eval_cmd->add_option("--train", ev.train_path, "training CSV")->required();
  eval_cmd->add_option("--test", ev.test_path, "test CSV")->required();
  eval_cmd->add_option("--label-column", ev.label_column, "label column");
  eval_cmd->add_option("--positive-label", ev.positive_label,
                       "token mapped to class 1");
  eval_cmd->add_option("--priors", ev.priors,
                       "estimated or known:<pi0>,<pi1>");
  eval_cmd->add_option("--d", ev.d, "projection dimension")->required();
  eval_cmd->add_option("--M", ev.M, "ensemble size")->required();
  eval_cmd->add_option("--seed", ev.seed, "RNG seed")->required();
  eval_cmd->add_option("--out", ev.out, "JSON report path");

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (sweep_cmd->parsed()) return cmd_sweep(sw);
    if (eval_cmd->parsed()) return cmd_eval(ev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
