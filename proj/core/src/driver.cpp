#include "asimm/driver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "asimm/centering.hpp"
#include "asimm/clustering.hpp"
#include "asimm/initializer.hpp"
#include "asimm/kmeans.hpp"
#include "asimm/rng.hpp"

namespace asimm {

namespace {

constexpr std::uint64_t kTagJitter = 0x6a69ULL;
constexpr std::uint64_t kTagKMeans = 0x6b6dULL;
constexpr double kBoundaryNudge = 1e-9;

ModelParams assemble_params(const SpectralData& data, int K, std::vector<int> z,
                            std::vector<double> v, CenteringResult&& centering) {
  ModelParams params;
  params.K = K;
  params.M = data.M;
  params.ell0 = data.ell0;
  params.horizon = data.horizon;
  params.z = std::move(z);
  params.v = std::move(v);
  params.a_prime = std::move(centering.a_prime);
  params.phi = std::move(centering.phi);
  params.lambda = std::move(centering.lambda);
  return params;
}

struct RunOutput {
  ModelParams params;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> subject_criterion;
  int rescued = 0;
  std::vector<std::pair<int, int>> ill_conditioned;
  std::vector<int> negative_baseline;
};

/// One pass of the alternating algorithm from a fixed initial state.
RunOutput run_algorithm(const SpectralData& data, std::vector<int> z0, std::vector<double> v0,
                        const FitConfig& config) {
  const bool fix_shifts = config.fixed_shifts.has_value();
  RunOutput out;
  std::vector<int> z = std::move(z0);
  std::vector<double> v = std::move(v0);
  std::vector<double> criterion(static_cast<std::size_t>(data.n), 0.0);

  double l_prev = std::numeric_limits<double>::infinity();
  for (int s = 0; s < config.max_outer_iters; ++s) {
    CenteringResult centered = centering_step(data, z, v, config.K, config.threads);
    ModelParams params = assemble_params(data, config.K, z, v, std::move(centered));

    ClusteringResult assigned =
        clustering_step(data, params, config.gamma, config.newton, config.threads, fix_shifts);
    z = assigned.z;
    v = assigned.v;
    criterion = assigned.criterion;

    // Empty-cluster rescue: donate the worst-fitting subject from a
    // cluster that can spare one, then re-center.
    std::vector<int> members(static_cast<std::size_t>(config.K), 0);
    for (int label : z) ++members[static_cast<std::size_t>(label)];
    bool rescued_now = false;
    for (int k = 0; k < config.K; ++k) {
      if (members[static_cast<std::size_t>(k)] > 0) continue;
      int pick = -1;
      double worst = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < data.n; ++i) {
        if (members[static_cast<std::size_t>(z[static_cast<std::size_t>(i)])] < 2) continue;
        if (criterion[static_cast<std::size_t>(i)] > worst) {
          worst = criterion[static_cast<std::size_t>(i)];
          pick = i;
        }
      }
      if (pick < 0) throw std::runtime_error("fit: cannot rescue empty cluster");
      --members[static_cast<std::size_t>(z[static_cast<std::size_t>(pick)])];
      z[static_cast<std::size_t>(pick)] = k;
      members[static_cast<std::size_t>(k)] = 1;
      ++out.rescued;
      rescued_now = true;
    }
    if (rescued_now) {
      CenteringResult redo = centering_step(data, z, v, config.K, config.threads);
      params = assemble_params(data, config.K, z, v, std::move(redo));
    } else {
      params.z = z;
      params.v = v;
    }

    double l_now = objective(data, params, config.gamma, config.threads);
    out.trace.push_back(l_now);
    out.iterations = s + 1;
    out.params = std::move(params);
    out.objective = l_now;
    if (l_prev - l_now <= config.epsilon * l_now || l_now == l_prev) {
      out.converged = true;
      break;
    }
    l_prev = l_now;
  }
  out.subject_criterion = std::move(criterion);
  return out;
}

}  // namespace

FitResult fit(const Dataset& dataset, const FitConfig& config, const InitOverride* extra_start) {
  config.check();
  if (config.restarts == 0 && extra_start == nullptr) {
    throw std::invalid_argument("fit: restarts = 0 requires an explicit start");
  }
  if (config.K > dataset.n) throw std::invalid_argument("fit: K exceeds subject count");
  if (config.fixed_shifts &&
      config.fixed_shifts->size() != static_cast<std::size_t>(dataset.n) * dataset.M) {
    throw std::invalid_argument("fit: fixed_shifts size mismatch");
  }

  FitDiagnostics diag;
  ValidationReport report = validate(dataset);
  if (!report.only_warnings()) {
    throw std::invalid_argument("fit: dataset failed validation: " +
                                report.issues.front().message);
  }

  // Boundary events are accepted after a nudge into the open interval.
  Dataset working = dataset;
  const double T = working.horizon;
  for (auto& ev : working.events) {
    for (double& t : ev.times) {
      if (t == 0.0) {
        t = kBoundaryNudge * T;
        ++diag.boundary_nudges;
      } else if (t == T) {
        t = T - kBoundaryNudge * T;
        ++diag.boundary_nudges;
      }
    }
  }
  if (diag.boundary_nudges > 0) {
    diag.warnings.push_back("nudged " + std::to_string(diag.boundary_nudges) +
                            " boundary event(s) into (0, T)");
  }

  SpectralData data = build_spectral(working, config.ell0, config.weight_mode);
  for (std::uint8_t flag : data.empty) diag.empty_observations += flag;

  InitShifts init = init_shifts(working);
  int missing = 0;
  for (std::uint8_t flag : init.missing) missing += flag;
  if (missing > 0) {
    diag.warnings.push_back(std::to_string(missing) +
                            " subject/stimulus pair(s) had no post-onset event; "
                            "their initial shifts are 0");
  }

  RunOutput best;
  int best_restart = -1;
  auto consider = [&](RunOutput run, int restart) {
    if (best_restart < 0 || run.objective < best.objective) {
      best = std::move(run);
      best_restart = restart;
    }
  };

  for (int restart = 0; restart < config.restarts; ++restart) {
    std::vector<double> v0;
    if (config.fixed_shifts) {
      v0 = *config.fixed_shifts;
    } else {
      v0 = init.v;
      if (restart > 0) {
        CounterRng rng({config.seed, kTagJitter, static_cast<std::uint64_t>(restart)});
        for (double& x : v0) x += rng.uniform(-T / 50.0, T / 50.0);
      }
    }
    std::uint64_t km_seed =
        CounterRng({config.seed, kTagKMeans, static_cast<std::uint64_t>(restart)}).next_u64();
    std::vector<int> z0 = init_memberships(working, v0, config.K, config.init_bins, km_seed);
    consider(run_algorithm(data, std::move(z0), std::move(v0), config), restart);
  }
  if (extra_start) {
    if (extra_start->z0.size() != static_cast<std::size_t>(dataset.n) ||
        extra_start->v0.size() != static_cast<std::size_t>(dataset.n) * dataset.M) {
      throw std::invalid_argument("fit: init override size mismatch");
    }
    std::vector<double> v0 =
        config.fixed_shifts ? *config.fixed_shifts : extra_start->v0;
    consider(run_algorithm(data, extra_start->z0, std::move(v0), config), config.restarts);
  }

  // Shifts are reported modulo T; values far outside the nominal latency
  // range are only warned about (optimization itself is unconstrained).
  if (!config.fixed_shifts) {
    int outside = 0;
    for (double& x : best.params.v) {
      x = std::fmod(x, T);
      if (x < 0.0) x += T;
      if (x > T / 4.0) ++outside;
    }
    if (outside > 0) {
      diag.warnings.push_back(std::to_string(outside) +
                              " fitted shift(s) fall outside [0, T/4] after wrapping");
    }
  }

  // Re-run the final centering once to surface its conditioning flags.
  CenteringResult final_center =
      centering_step(data, best.params.z, best.params.v, config.K, config.threads);
  diag.ill_conditioned = std::move(final_center.ill_conditioned);
  diag.negative_baseline = std::move(final_center.negative_baseline);
  diag.rescued_clusters = best.rescued;
  for (int k : diag.negative_baseline) {
    diag.warnings.push_back("cluster " + std::to_string(k + 1) +
                            " has a negative normalized baseline");
  }

  FitResult result;
  result.params = std::move(best.params);
  result.trace = std::move(best.trace);
  result.iterations = best.iterations;
  result.converged = best.converged;
  result.objective = best.objective;
  result.restart_index = best_restart;
  result.subject_criterion = std::move(best.subject_criterion);
  result.diag = std::move(diag);
  return result;
}

KSelection select_k_preliminary(const Dataset& dataset, int k_max, std::uint64_t seed,
                                double drop_threshold) {
  if (k_max < 1) throw std::invalid_argument("select_k_preliminary: k_max must be >= 1");
  k_max = std::min(k_max, dataset.n);

  std::vector<double> features(static_cast<std::size_t>(dataset.n), 0.0);
  for (int i = 0; i < dataset.n; ++i) {
    double total = 0.0;
    for (int r = 0; r < dataset.R; ++r) {
      total += static_cast<double>(dataset.at(i, r).count());
    }
    features[static_cast<std::size_t>(i)] = total / std::max(1, dataset.R);
  }

  KSelection sel;
  std::optional<std::vector<double>> warm;
  for (int K = 1; K <= k_max; ++K) {
    if (warm) {
      // Nested seeding: previous best centers plus the farthest point.
      double best_dist = -1.0;
      double pick = features.empty() ? 0.0 : features[0];
      for (double f : features) {
        double min_d = std::numeric_limits<double>::infinity();
        for (double c : *warm) min_d = std::min(min_d, (f - c) * (f - c));
        if (min_d > best_dist) {
          best_dist = min_d;
          pick = f;
        }
      }
      warm->push_back(pick);
    }
    std::uint64_t km_seed =
        CounterRng({seed, kTagKMeans, static_cast<std::uint64_t>(K)}).next_u64();
    KMeansResult res = lloyd_kmeans(features, dataset.n, 1, K, km_seed, 25, warm);
    sel.grid.push_back(K);
    sel.curve.push_back(res.within_ss);
    warm = res.centers;
  }

  sel.K = sel.grid.back();
  for (std::size_t j = 0; j + 1 < sel.curve.size(); ++j) {
    double ss = sel.curve[j];
    double drop = ss <= 0.0 ? 0.0 : (ss - sel.curve[j + 1]) / ss;
    if (drop < drop_threshold) {
      sel.K = sel.grid[j];
      break;
    }
  }
  return sel;
}

GammaReference gamma_reference(const Dataset& dataset, double delta_t) {
  double total = 0.0;
  for (const auto& ev : dataset.events) total += static_cast<double>(ev.count());
  if (total <= 0.0) throw std::invalid_argument("gamma_reference: dataset has no events");
  const double T = dataset.horizon;
  double dt = delta_t > 0.0 ? delta_t : T / 2048.0;

  GammaReference ref;
  ref.gamma0 = static_cast<double>(dataset.n) * dataset.R / (T * dt * total);
  // 13 log-spaced points spanning [1e-5 g0, 10 g0] (half-decade spacing).
  for (int j = 0; j < 13; ++j) {
    ref.grid.push_back(ref.gamma0 * std::pow(10.0, -5.0 + 0.5 * j));
  }
  return ref;
}

int select_gamma_from_curve(std::span<const double> l1, double band) {
  if (l1.empty()) throw std::invalid_argument("select_gamma_from_curve: empty curve");
  double running_min = std::numeric_limits<double>::infinity();
  int chosen = 0;
  for (std::size_t j = 0; j < l1.size(); ++j) {
    running_min = std::min(running_min, l1[j]);
    if (l1[j] <= (1.0 + band) * running_min) chosen = static_cast<int>(j);
  }
  return chosen;
}

GammaSelection select_gamma(const Dataset& dataset, int k0, std::span<const double> gamma_grid,
                            const FitConfig& base_config) {
  if (gamma_grid.empty()) throw std::invalid_argument("select_gamma: empty grid");
  GammaSelection sel;
  sel.grid.assign(gamma_grid.begin(), gamma_grid.end());
  SpectralData data = build_spectral(dataset, base_config.ell0, base_config.weight_mode);
  for (double gamma : gamma_grid) {
    FitConfig cfg = base_config;
    cfg.K = k0;
    cfg.gamma = gamma;
    FitResult res = fit(dataset, cfg);
    sel.l1.push_back(loss_l1(data, res.params, cfg.threads));
    sel.l2.push_back(loss_l2(data, res.params));
    sel.objective.push_back(res.objective);
  }
  sel.index = select_gamma_from_curve(sel.l1, base_config.gamma_band);
  sel.gamma = sel.grid[static_cast<std::size_t>(sel.index)];
  return sel;
}

KSelection refine_k(const Dataset& dataset, double gamma, std::span<const int> k_grid,
                    const FitConfig& base_config) {
  if (k_grid.empty()) throw std::invalid_argument("refine_k: empty grid");
  KSelection sel;
  std::optional<FitResult> prev;
  int prev_k = -1;
  for (int K : k_grid) {
    FitConfig cfg = base_config;
    cfg.K = K;
    cfg.gamma = gamma;
    FitResult res;
    if (prev && K == prev_k + 1) {
      // Nested warm start: previous labels plus the worst-fitting subject
      // split into the new cluster, which keeps the curve non-increasing.
      InitOverride warm;
      warm.z0 = prev->params.z;
      warm.v0 = prev->params.v;
      std::vector<int> members(static_cast<std::size_t>(prev_k), 0);
      for (int label : warm.z0) ++members[static_cast<std::size_t>(label)];
      int pick = -1;
      double worst = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < dataset.n; ++i) {
        if (members[static_cast<std::size_t>(warm.z0[static_cast<std::size_t>(i)])] < 2) continue;
        if (prev->subject_criterion[static_cast<std::size_t>(i)] > worst) {
          worst = prev->subject_criterion[static_cast<std::size_t>(i)];
          pick = i;
        }
      }
      if (pick >= 0) {
        warm.z0[static_cast<std::size_t>(pick)] = K - 1;
        res = fit(dataset, cfg, &warm);
      } else {
        res = fit(dataset, cfg);
      }
    } else {
      res = fit(dataset, cfg);
    }
    sel.grid.push_back(K);
    sel.curve.push_back(res.objective);
    prev = std::move(res);
    prev_k = K;
  }

  sel.K = sel.grid.back();
  for (std::size_t j = 0; j + 1 < sel.curve.size(); ++j) {
    double obj = sel.curve[j];
    double drop = obj <= 0.0 ? 0.0 : (obj - sel.curve[j + 1]) / obj;
    if (drop < base_config.elbow_drop) {
      sel.K = sel.grid[j];
      break;
    }
  }
  return sel;
}

DesignCheck check_design(std::span<const double> shifts, int R, int M,
                         std::span<const double> xi_grid, double horizon) {
  if (R < M) throw std::invalid_argument("check_design: requires R >= M");
  if (shifts.size() != static_cast<std::size_t>(R) * M) {
    throw std::invalid_argument("check_design: shifts size mismatch");
  }
  DesignCheck check;
  if (xi_grid.empty()) {
    if (horizon <= 0.0) throw std::invalid_argument("check_design: no xi grid and no horizon");
    for (int l = 1; l <= 10; ++l) check.xi_grid.push_back(l / horizon);
  } else {
    check.xi_grid.assign(xi_grid.begin(), xi_grid.end());
  }

  const double two_pi = 2.0 * std::numbers::pi;
  check.min_singular_value = std::numeric_limits<double>::infinity();
  for (double xi : check.xi_grid) {
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(M, M);
    Eigen::VectorXcd eta(M);
    for (int r = 0; r < R; ++r) {
      for (int m = 0; m < M; ++m) {
        double phase = -two_pi * xi * shifts[static_cast<std::size_t>(r) * M + m];
        eta(m) = Complex(std::cos(phase), std::sin(phase));
      }
      gram += eta.conjugate() * eta.transpose();
    }
    gram /= static_cast<double>(R);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
    double smin = svd.singularValues()(M - 1);
    check.singular_values.push_back(smin);
    if (smin < check.min_singular_value) {
      check.min_singular_value = smin;
      check.worst_xi = xi;
    }
  }
  check.pass = check.min_singular_value > 1e-6;
  return check;
}

}  // namespace asimm
