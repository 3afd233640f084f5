#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "asimm/driver.hpp"
#include "asimm/io.hpp"
#include "asimm/metrics.hpp"
#include "asimm/model.hpp"
#include "asimm/parallel.hpp"
#include "asimm/simgen.hpp"
#include "asimm/version.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitNoConvergence = 3;

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
}

std::string json_scalar_to_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

/// Expands a JSON config file into command-line tokens for every key the
/// user did not pass explicitly, so real flags take precedence.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  json cfg = json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");

  for (auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    bool present = false;
    for (const std::string& arg : args) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) present = true;
    }
    if (present) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& item : value) args.push_back(json_scalar_to_string(item));
    } else {
      args.push_back(flag);
      args.push_back(json_scalar_to_string(value));
    }
  }
  return args;
}

// ---------------------------------------------------------------------------
// Shared option blocks
// ---------------------------------------------------------------------------

struct DataInput {
  std::string data;    // JSON dataset
  std::string events;  // CSV pair
  std::string shifts;
  double horizon = 0.0;

  void add_options(CLI::App* sub) {
    sub->add_option("--data", data, "dataset JSON file");
    sub->add_option("--events", events, "events CSV (subject_id,trial_id,event_time)");
    sub->add_option("--shifts", shifts, "shifts CSV (trial_id,component,shift)");
    sub->add_option("--horizon", horizon, "observation horizon T for CSV input (seconds)");
  }

  asimm::Dataset load() const {
    if (!data.empty()) return asimm::io::read_dataset_json(data);
    if (!events.empty() && !shifts.empty()) {
      if (horizon <= 0.0) {
        throw CLI::ValidationError("--horizon is required with CSV input");
      }
      return asimm::io::read_dataset_csv(events, shifts, horizon);
    }
    throw CLI::ValidationError("provide --data or --events/--shifts/--horizon");
  }

  json describe() const {
    return {{"data", data}, {"events", events}, {"shifts", shifts}, {"horizon", horizon}};
  }
};

struct FitOptions {
  int K = 1;
  double gamma = 0.0;
  int ell0 = 10;
  double epsilon = 0.005;
  int max_iters = 50;
  int newton_iters = 20;
  double grad_tol = 1e-8;
  std::string weights = "count";
  int restarts = 1;
  std::uint64_t seed = 0;
  int threads = 0;
  double elbow_drop = 0.10;
  double gamma_band = 0.05;

  void add_options(CLI::App* sub) {
    sub->add_option("--K", K, "number of clusters");
    sub->add_option("--gamma", gamma, "count-loss weight");
    sub->add_option("--ell0", ell0, "truncation frequency")->capture_default_str();
    sub->add_option("--epsilon", epsilon, "relative-decrease stopping threshold")
        ->capture_default_str();
    sub->add_option("--max-iters", max_iters, "outer iteration cap")->capture_default_str();
    sub->add_option("--newton-iters", newton_iters, "shift-update iteration cap")
        ->capture_default_str();
    sub->add_option("--grad-tol", grad_tol, "shift-update gradient tolerance")
        ->capture_default_str();
    sub->add_option("--weights", weights, "observation weights: count|uniform")
        ->capture_default_str();
    sub->add_option("--restarts", restarts, "number of restarts")->capture_default_str();
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--threads", threads, "worker threads (0 = ASIMM_THREADS or hardware)");
    sub->add_option("--elbow-drop", elbow_drop, "relative-drop threshold for elbow rules")
        ->capture_default_str();
    sub->add_option("--gamma-band", gamma_band, "flatness band for the gamma rule")
        ->capture_default_str();
  }

  asimm::FitConfig to_config() const {
    asimm::FitConfig cfg;
    cfg.K = K;
    cfg.gamma = gamma;
    cfg.ell0 = ell0;
    cfg.epsilon = epsilon;
    cfg.max_outer_iters = max_iters;
    cfg.newton.max_iters = newton_iters;
    cfg.newton.grad_tol = grad_tol;
    cfg.weight_mode = asimm::io::parse_weight_mode(weights);
    cfg.restarts = restarts;
    cfg.seed = seed;
    cfg.threads = threads > 0 ? threads : asimm::default_thread_count();
    cfg.elbow_drop = elbow_drop;
    cfg.gamma_band = gamma_band;
    return cfg;
  }

  json describe() const {
    return {{"K", K},
            {"gamma", gamma},
            {"ell0", ell0},
            {"epsilon", epsilon},
            {"max_iters", max_iters},
            {"newton_iters", newton_iters},
            {"grad_tol", grad_tol},
            {"weights", weights},
            {"restarts", restarts},
            {"seed", seed},
            {"threads", threads},
            {"elbow_drop", elbow_drop},
            {"gamma_band", gamma_band}};
  }
};

json manifest_header(const std::string& command) {
  return {{"command", command}, {"version", std::string(asimm::kVersion)}};
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateCmd {
  int scenario = 1;
  int n = 40;
  int R = 3;
  double tau = 0.3;
  double rho = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::string out;

  int run() {
    asimm::Dataset dataset;
    asimm::GroundTruth truth;
    if (scenario == 1) {
      std::tie(dataset, truth) = asimm::scenario1(n, R, tau, seed, replicate);
    } else if (scenario == 2) {
      std::tie(dataset, truth) = asimm::scenario2(n, R, tau, rho, seed, replicate);
    } else {
      throw CLI::ValidationError("--scenario must be 1 or 2");
    }
    asimm::io::write_dataset_json(dataset, out + ".json");
    asimm::io::write_dataset_csv(dataset, out + ".events.csv", out + ".shifts.csv");
    asimm::io::write_truth_json(truth, n, R, seed, replicate, out + ".truth.json");
    // Aggregated empirical intensities for external curve-clustering tools.
    asimm::io::write_aggregated_intensity_csv(dataset, 512, out + ".aggregated.csv");

    json manifest = manifest_header("simulate");
    manifest["scenario"] = scenario;
    manifest["n"] = n;
    manifest["R"] = R;
    manifest["tau"] = tau;
    manifest["rho"] = scenario == 2 ? json(rho) : json(nullptr);
    manifest["seed"] = seed;
    manifest["replicate"] = replicate;
    manifest["lambda"] = truth.lambda;
    manifest["outputs"] = {out + ".json", out + ".events.csv", out + ".shifts.csv",
                           out + ".truth.json", out + ".aggregated.csv"};
    write_json_file(manifest, out + ".manifest.json");
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitCmd {
  DataInput input;
  FitOptions options;
  std::string known_v_from;
  std::string out;

  int run() {
    asimm::Dataset dataset = input.load();
    asimm::FitConfig cfg = options.to_config();
    if (!known_v_from.empty()) {
      auto truth = asimm::io::read_truth_json(known_v_from);
      cfg.fixed_shifts = truth.truth.v;
    }
    asimm::FitResult result = asimm::fit(dataset, cfg);
    asimm::io::write_fit_result_json(result, cfg, out + ".json");
    asimm::io::write_trace_csv(result.trace, out + ".trace.csv");

    json manifest = manifest_header("fit");
    manifest["input"] = input.describe();
    manifest["config"] = options.describe();
    manifest["known_v"] = !known_v_from.empty();
    manifest["converged"] = result.converged;
    manifest["iterations"] = result.iterations;
    manifest["objective"] = result.objective;
    manifest["outputs"] = {out + ".json", out + ".trace.csv"};
    write_json_file(manifest, out + ".manifest.json");
    return result.converged ? kExitOk : kExitNoConvergence;
  }
};

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

struct TuneCmd {
  DataInput input;
  FitOptions options;
  int k_max = 6;
  double delta_t = 0.0;
  std::string out;

  int run() {
    asimm::Dataset dataset = input.load();
    asimm::FitConfig cfg = options.to_config();

    auto prelim = asimm::select_k_preliminary(dataset, k_max, cfg.seed, cfg.elbow_drop);
    auto reference = asimm::gamma_reference(dataset, delta_t);
    auto gamma_sel = asimm::select_gamma(dataset, prelim.K, reference.grid, cfg);
    std::vector<int> k_grid;
    for (int K = 1; K <= k_max; ++K) k_grid.push_back(K);
    auto k_sel = asimm::refine_k(dataset, gamma_sel.gamma, k_grid, cfg);

    {
      std::vector<double> keys(prelim.grid.begin(), prelim.grid.end());
      asimm::io::write_curve_csv("K", keys, {}, {}, prelim.curve, out + ".kprelim.csv");
    }
    asimm::io::write_curve_csv("gamma", gamma_sel.grid, gamma_sel.l1, gamma_sel.l2,
                               gamma_sel.objective, out + ".gamma.csv");
    {
      std::vector<double> keys(k_sel.grid.begin(), k_sel.grid.end());
      asimm::io::write_curve_csv("K", keys, {}, {}, k_sel.curve, out + ".krefine.csv");
    }

    json report = manifest_header("tune");
    report["input"] = input.describe();
    report["config"] = options.describe();
    report["k_max"] = k_max;
    report["K0"] = prelim.K;
    report["gamma0"] = reference.gamma0;
    report["gamma_grid"] = reference.grid;
    report["gamma_star"] = gamma_sel.gamma;
    report["gamma_index"] = gamma_sel.index;
    report["K_star"] = k_sel.K;
    report["outputs"] = {out + ".kprelim.csv", out + ".gamma.csv", out + ".krefine.csv"};
    write_json_file(report, out + ".tune.json");
    write_json_file(report, out + ".manifest.json");
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct MetricsRow {
  std::uint64_t replicate = 0;
  int n = 0;
  int R = 0;
  double tau = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  int K = 0;
  double mise = 0.0;
  double ari = 0.0;
  int iters = 0;
  bool converged = false;
};

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "replicate,n,R,tau,rho,gamma,K,mise,ari,iters,converged\n";
  for (const auto& row : rows) {
    out << row.replicate << ',' << row.n << ',' << row.R << ','
        << asimm::io::format_double(row.tau) << ',' << asimm::io::format_double(row.rho) << ','
        << asimm::io::format_double(row.gamma) << ',' << row.K << ','
        << asimm::io::format_double(row.mise) << ',' << asimm::io::format_double(row.ari) << ','
        << row.iters << ',' << (row.converged ? 1 : 0) << '\n';
  }
}

/// MISE + ARI of a fit against the generating truth, matching estimated
/// clusters to true clusters by the best label permutation.
MetricsRow compute_metrics(const asimm::FitResult& result, const asimm::FitConfig& cfg,
                           const asimm::io::TruthFile& truth_file) {
  const asimm::GroundTruth& truth = truth_file.truth;
  MetricsRow row;
  row.replicate = truth_file.replicate;
  row.n = truth_file.n;
  row.R = truth_file.R;
  row.tau = truth.tau;
  row.rho = truth.rho;
  row.gamma = cfg.gamma;
  row.K = cfg.K;
  row.iters = result.iterations;
  row.converged = result.converged;
  row.ari = asimm::ari(truth.z, result.params.z);

  int K = std::max(result.params.K, truth.K);
  auto sigma = asimm::best_label_permutation(truth.z, result.params.z, K);
  double total = 0.0;
  int counted = 0;
  for (int k = 0; k < result.params.K; ++k) {
    int true_k = sigma[static_cast<std::size_t>(k)];
    if (true_k >= truth.K) continue;
    std::vector<asimm::SpectralCurve> est;
    std::vector<std::function<double(double)>> target;
    for (int m = 0; m < truth.M; ++m) {
      est.push_back(result.params.component(k, m));
      const asimm::IntensityComponent& comp = truth.component(true_k, m);
      target.push_back([&comp](double t) { return comp.evaluate(t); });
    }
    total += asimm::mise(est, target, truth.lambda[static_cast<std::size_t>(true_k)]);
    ++counted;
  }
  row.mise = counted > 0 ? total / counted : 0.0;
  return row;
}

/// Truth used directly as the estimate: grid-sampled normalized components.
MetricsRow truth_as_estimate_metrics(const asimm::io::TruthFile& truth_file) {
  const asimm::GroundTruth& truth = truth_file.truth;
  MetricsRow row;
  row.replicate = truth_file.replicate;
  row.n = truth_file.n;
  row.R = truth_file.R;
  row.tau = truth.tau;
  row.rho = truth.rho;
  row.K = truth.K;
  row.converged = true;
  row.ari = asimm::ari(truth.z, truth.z);

  double total = 0.0;
  const int G = 2048;
  for (int k = 0; k < truth.K; ++k) {
    for (int m = 0; m < truth.M; ++m) {
      const asimm::IntensityComponent& comp = truth.component(k, m);
      double lambda = truth.lambda[static_cast<std::size_t>(k)];
      std::vector<double> samples(G);
      for (int g = 0; g < G; ++g) {
        samples[static_cast<std::size_t>(g)] = comp.evaluate(g * truth.horizon / G) / lambda;
      }
      auto normalized = [&comp, lambda](double t) { return comp.evaluate(t) / lambda; };
      total += asimm::shift_aligned_distance(samples, truth.horizon, normalized).distance;
    }
  }
  row.mise = total / (truth.K * truth.M);
  return row;
}

struct EvaluateCmd {
  std::string fit_path;
  std::string truth_path;
  std::string out;

  int run() {
    auto truth_file = asimm::io::read_truth_json(truth_path);

    MetricsRow row;
    json confusion = json::array();
    // A truth file passed as the estimate evaluates against itself.
    json probe = json::parse(std::ifstream(fit_path));
    if (probe.contains("scenario")) {
      auto est_truth = asimm::io::read_truth_json(fit_path);
      row = truth_as_estimate_metrics(est_truth);
      for (const auto& line : asimm::contingency(truth_file.truth.z, est_truth.truth.z)) {
        confusion.push_back(line);
      }
    } else {
      auto fit_file = asimm::io::read_fit_result_json(fit_path);
      if (fit_file.result.params.n() != truth_file.n) {
        throw std::runtime_error("evaluate: subject count mismatch between fit and truth");
      }
      row = compute_metrics(fit_file.result, fit_file.config, truth_file);
      for (const auto& line : asimm::contingency(truth_file.truth.z, fit_file.result.params.z)) {
        confusion.push_back(line);
      }
    }
    write_metrics_csv({row}, out + ".csv");

    json manifest = manifest_header("evaluate");
    manifest["fit"] = fit_path;
    manifest["truth"] = truth_path;
    manifest["mise"] = row.mise;
    manifest["ari"] = row.ari;
    manifest["confusion"] = confusion;
    manifest["outputs"] = {out + ".csv"};
    write_json_file(manifest, out + ".manifest.json");
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepCmd {
  int scenario = 1;
  std::string vary = "R";
  std::vector<double> values;
  int replicates = 20;
  int n = 40;
  int R = 3;
  double tau = 0.3;
  double rho = 0.5;
  bool known_v = false;
  FitOptions options;
  std::string out;

  int run() {
    if (values.empty()) throw CLI::ValidationError("--values must not be empty");
    if (vary != "R" && vary != "n" && vary != "tau" && vary != "rho") {
      throw CLI::ValidationError("--vary must be one of R|n|tau|rho");
    }

    struct Task {
      std::size_t value_index;
      int replicate;
    };
    std::vector<Task> tasks;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      for (int rep = 0; rep < replicates; ++rep) tasks.push_back({vi, rep});
    }
    std::vector<MetricsRow> rows(tasks.size());

    asimm::FitConfig base_cfg = options.to_config();
    int pool = base_cfg.threads;
    asimm::parallel_for(tasks.size(), pool, [&](std::size_t t) {
      const Task& task = tasks[t];
      int n_now = n, R_now = R;
      double tau_now = tau, rho_now = rho;
      double value = values[task.value_index];
      if (vary == "R") R_now = static_cast<int>(value);
      if (vary == "n") n_now = static_cast<int>(value);
      if (vary == "tau") tau_now = value;
      if (vary == "rho") rho_now = value;

      std::uint64_t rep_key =
          (static_cast<std::uint64_t>(task.value_index) << 32) + static_cast<std::uint64_t>(task.replicate);
      asimm::Dataset dataset;
      asimm::GroundTruth truth;
      if (scenario == 1) {
        std::tie(dataset, truth) = asimm::scenario1(n_now, R_now, tau_now, options.seed, rep_key);
      } else {
        std::tie(dataset, truth) = asimm::scenario2(n_now, R_now, tau_now, rho_now, options.seed, rep_key);
      }

      asimm::FitConfig cfg = base_cfg;
      cfg.threads = 1;  // parallelism lives at the replicate level
      cfg.seed = options.seed ^ rep_key;
      if (known_v) cfg.fixed_shifts = truth.v;
      asimm::FitResult result = asimm::fit(dataset, cfg);

      asimm::io::TruthFile tf;
      tf.truth = truth;
      tf.n = n_now;
      tf.R = R_now;
      tf.seed = options.seed;
      tf.replicate = static_cast<std::uint64_t>(task.replicate);
      rows[t] = compute_metrics(result, cfg, tf);
    });

    write_metrics_csv(rows, out + ".replicates.csv");

    std::ofstream agg(out + ".aggregate.csv");
    if (!agg) throw std::runtime_error("cannot open for writing: " + out + ".aggregate.csv");
    agg << "vary,value,n,R,tau,rho,gamma,K,known_v,replicates,"
           "mean_mise,se_mise,mean_ari,se_ari\n";
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      double sum_mise = 0.0, sum_ari = 0.0;
      for (int rep = 0; rep < replicates; ++rep) {
        const MetricsRow& row = rows[vi * static_cast<std::size_t>(replicates) + rep];
        sum_mise += row.mise;
        sum_ari += row.ari;
      }
      double mean_mise = sum_mise / replicates;
      double mean_ari = sum_ari / replicates;
      double var_mise = 0.0, var_ari = 0.0;
      for (int rep = 0; rep < replicates; ++rep) {
        const MetricsRow& row = rows[vi * static_cast<std::size_t>(replicates) + rep];
        var_mise += (row.mise - mean_mise) * (row.mise - mean_mise);
        var_ari += (row.ari - mean_ari) * (row.ari - mean_ari);
      }
      int denom = std::max(1, replicates - 1);
      double se_mise = std::sqrt(var_mise / denom / replicates);
      double se_ari = std::sqrt(var_ari / denom / replicates);

      const MetricsRow& first = rows[vi * static_cast<std::size_t>(replicates)];
      agg << vary << ',' << asimm::io::format_double(values[vi]) << ',' << first.n << ','
          << first.R << ',' << asimm::io::format_double(first.tau) << ','
          << asimm::io::format_double(first.rho) << ','
          << asimm::io::format_double(options.gamma) << ',' << options.K << ','
          << (known_v ? 1 : 0) << ',' << replicates << ','
          << asimm::io::format_double(mean_mise) << ',' << asimm::io::format_double(se_mise)
          << ',' << asimm::io::format_double(mean_ari) << ',' << asimm::io::format_double(se_ari)
          << '\n';
    }

    json manifest = manifest_header("sweep");
    manifest["scenario"] = scenario;
    manifest["vary"] = vary;
    manifest["values"] = values;
    manifest["replicates"] = replicates;
    manifest["n"] = n;
    manifest["R"] = R;
    manifest["tau"] = tau;
    manifest["rho"] = rho;
    manifest["known_v"] = known_v;
    manifest["config"] = options.describe();
    manifest["outputs"] = {out + ".replicates.csv", out + ".aggregate.csv"};
    write_json_file(manifest, out + ".manifest.json");
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"additive shape invariant mixture models for recurrent-event data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(asimm::kVersion));

  std::string config_file;  // consumed before parsing; bound so CLI11 accepts it

  SimulateCmd simulate;
  auto* sim = app.add_subcommand("simulate", "generate synthetic datasets with ground truth");
  sim->add_option("--scenario", simulate.scenario, "1 (single cluster) or 2 (four clusters)")
      ->capture_default_str();
  sim->add_option("--n", simulate.n, "subjects")->capture_default_str();
  sim->add_option("--R", simulate.R, "observations per subject")->capture_default_str();
  sim->add_option("--tau", simulate.tau, "onset jitter range")->capture_default_str();
  sim->add_option("--rho", simulate.rho, "cluster separation (scenario 2)")->capture_default_str();
  sim->add_option("--seed", simulate.seed, "random seed");
  sim->add_option("--replicate", simulate.replicate, "replicate index");
  sim->add_option("--out", simulate.out, "output path prefix")->required();
  sim->add_option("--config", config_file, "JSON config file mirroring the flags");

  FitCmd fit_cmd;
  auto* fit = app.add_subcommand("fit", "fit the mixture model to a dataset");
  fit_cmd.input.add_options(fit);
  fit_cmd.options.add_options(fit);
  fit->add_option("--known-v-from", fit_cmd.known_v_from,
                  "truth JSON whose subject shifts are fixed during fitting");
  fit->add_option("--out", fit_cmd.out, "output path prefix")->required();
  fit->add_option("--config", config_file, "JSON config file mirroring the flags");

  TuneCmd tune;
  auto* tun = app.add_subcommand("tune", "select K and gamma via the heuristic rules");
  tune.input.add_options(tun);
  tune.options.add_options(tun);
  tun->add_option("--k-max", tune.k_max, "largest K to scan")->capture_default_str();
  tun->add_option("--delta-t", tune.delta_t, "bin width for the gamma reference (default T/2048)");
  tun->add_option("--out", tune.out, "output path prefix")->required();
  tun->add_option("--config", config_file, "JSON config file mirroring the flags");

  EvaluateCmd evaluate;
  auto* eva = app.add_subcommand("evaluate", "score a fit against the generating truth");
  eva->add_option("--fit", evaluate.fit_path, "fit result JSON (or a truth JSON)")->required();
  eva->add_option("--truth", evaluate.truth_path, "truth JSON")->required();
  eva->add_option("--out", evaluate.out, "output path prefix")->required();
  eva->add_option("--config", config_file, "JSON config file mirroring the flags");

  SweepCmd sweep;
  auto* swp = app.add_subcommand("sweep", "replicated experiments over a parameter grid");
  swp->add_option("--scenario", sweep.scenario, "1 or 2")->capture_default_str();
  swp->add_option("--vary", sweep.vary, "grid axis: R|n|tau|rho")->capture_default_str();
  swp->add_option("--values", sweep.values, "grid values")->required()->expected(-1);
  swp->add_option("--replicates", sweep.replicates, "replicates per grid point")
      ->capture_default_str();
  swp->add_option("--n", sweep.n, "base subjects")->capture_default_str();
  swp->add_option("--R", sweep.R, "base observations")->capture_default_str();
  swp->add_option("--tau", sweep.tau, "base onset jitter")->capture_default_str();
  swp->add_option("--rho", sweep.rho, "base separation")->capture_default_str();
  swp->add_flag("--known-v", sweep.known_v, "fix subject shifts to the generating truth");
  sweep.options.add_options(swp);
  swp->add_option("--out", sweep.out, "output path prefix")->required();
  swp->add_option("--config", config_file, "JSON config file mirroring the flags");

  try {
    std::vector<std::string> args =
        merge_config_args(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());  // CLI11's vector overload pops from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (sim->parsed()) return simulate.run();
    if (fit->parsed()) return fit_cmd.run();
    if (tun->parsed()) return tune.run();
    if (eva->parsed()) return evaluate.run();
    if (swp->parsed()) return sweep.run();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
