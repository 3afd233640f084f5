#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asimm/event_data.hpp"
#include "asimm/model.hpp"

namespace asimm {

struct FitDiagnostics {
  int boundary_nudges = 0;             // events moved off t = 0 or t = T
  int empty_observations = 0;          // cells with N = 0 (beta = 0)
  int rescued_clusters = 0;            // empty-cluster rescues performed
  std::vector<std::pair<int, int>> ill_conditioned;  // (k, l) ridge solves in final centering
  std::vector<int> negative_baseline;  // clusters with a' < 0 in final centering
  std::vector<std::string> warnings;
};

struct FitResult {
  ModelParams params;
  std::vector<double> trace;  // objective after each outer iteration
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  int restart_index = 0;                  // which restart produced this result
  std::vector<double> subject_criterion;  // per-subject L_{1,i} + gamma L_{2,i}
  FitDiagnostics diag;
};

/// Optional initial state, tried as one extra restart (used by refine_k to
/// nest fits across K).
struct InitOverride {
  std::vector<int> z0;
  std::vector<double> v0;
};

/// Alternating centering/clustering fit. Deterministic given (dataset,
/// config); the trace is non-increasing and the best restart by final
/// objective is returned. Empty clusters are rescued by donating the
/// worst-fitting subject.
FitResult fit(const Dataset& dataset, const FitConfig& config,
              const InitOverride* extra_start = nullptr);

struct KSelection {
  int K = 1;
  std::vector<int> grid;
  std::vector<double> curve;  // within-cluster SS (or objective) per grid K
};

/// k-means elbow on per-subject mean counts: smallest K whose relative SS
/// drop to K+1 falls below the threshold. The SS curve is nested across K
/// (each K warm-starts from the previous best centers plus one farthest
/// point) so it is non-increasing.
KSelection select_k_preliminary(const Dataset& dataset, int k_max, std::uint64_t seed = 0,
                                double drop_threshold = 0.10);

struct GammaReference {
  double gamma0 = 0.0;
  std::vector<double> grid;  // 13 log-spaced points on [1e-5 g0, 10 g0]
};

/// gamma0 = (nR) / (T dt sum N); scan grid spans [1e-5 gamma0, 10 gamma0].
/// dt defaults to T/2048 when not positive. Throws when the dataset has no
/// events.
GammaReference gamma_reference(const Dataset& dataset, double delta_t = 0.0);

struct GammaSelection {
  double gamma = 0.0;
  int index = 0;
  std::vector<double> grid;
  std::vector<double> l1;
  std::vector<double> l2;
  std::vector<double> objective;
};

/// Pure selection rule: the largest gamma whose L1 stays within the
/// (1 + band) envelope of the running minimum.
int select_gamma_from_curve(std::span<const double> l1, double band = 0.05);

/// Fits at each grid gamma (ascending) with K = k0 and applies the rule
/// above; returns the (L1, L2) curves for plotting.
GammaSelection select_gamma(const Dataset& dataset, int k0, std::span<const double> gamma_grid,
                            const FitConfig& base_config);

/// Fits per K on the grid at fixed gamma; elbow by the same relative-drop
/// rule on the objective curve. Fits are nested across K via warm starts,
/// making the curve non-increasing.
KSelection refine_k(const Dataset& dataset, double gamma, std::span<const int> k_grid,
                    const FitConfig& base_config);

struct DesignCheck {
  bool pass = false;
  double min_singular_value = 0.0;
  double worst_xi = 0.0;
  std::vector<double> xi_grid;
  std::vector<double> singular_values;  // min singular value per xi
};

/// Empirical Gram matrix E[conj(eta*(xi)) eta*(xi)^T] over the sampled
/// observation shifts, scanned across the xi grid; PASS when the minimum
/// singular value stays above 1e-6. shifts is R x M row-major; requires
/// R >= M. An empty xi grid defaults to l/T for l = 1..10 when horizon > 0.
DesignCheck check_design(std::span<const double> shifts, int R, int M,
                         std::span<const double> xi_grid, double horizon = 0.0);

}  // namespace asimm
