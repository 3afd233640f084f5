#pragma once

#include <span>
#include <vector>

#include "asimm/event_data.hpp"
#include "asimm/model.hpp"

namespace asimm {

/// One subject's shift optimization problem against one candidate cluster:
/// its R coefficient rows, counts and weights, plus that cluster's
/// (a'_k, phi'_{k,*}) parameters.
struct SubjectProblem {
  const SpectralData* data = nullptr;
  int subject = 0;
  double a_prime = 0.0;
  std::span<const SpectralCurve> components;  // M curves of the candidate cluster

  int M() const { return data->M; }
  int ell0() const { return data->ell0; }
  double horizon() const { return data->horizon; }
};

/// Q_i(v): the v-dependent part of L_{1,i} (frequency terms l != 0 only):
/// sum_r beta_{i,r} sum_{0<|l|<=ell0} |eta_{i,r,l}/N - sum_m e^{-j2pi l(v_m+w*_{r,m})/T} phi'_{k,m,l}|^2.
/// Periodic in each coordinate with period T; differs from L_{1,i} by
/// v-independent constants.
double q_value(const SubjectProblem& problem, std::span<const double> v);

/// Analytic gradient of q_value, length M.
std::vector<double> q_gradient(const SubjectProblem& problem, std::span<const double> v);

/// Analytic Hessian of q_value, row-major M x M, symmetric by construction.
std::vector<double> q_hessian(const SubjectProblem& problem, std::span<const double> v);

/// Coordinate clamp for the Newton displacement: values outside
/// [-T/10, T/10] are truncated to the boundary.
double newton_trunc(double x, double horizon);

struct ShiftOptimum {
  std::vector<double> v;
  double q = 0.0;
  int iterations = 0;
};

/// Guarded Newton descent on Q_i from v_init: the clamped Newton step is
/// accepted only if Q decreases, halving up to 10 times otherwise; an
/// indefinite or singular Hessian falls back to a clamped gradient step.
/// Always returns Q(v_opt) <= Q(v_init). Stops when the gradient norm
/// drops below grad_tol or after max_iters iterations.
ShiftOptimum optimize_shifts(const SubjectProblem& problem, std::span<const double> v_init,
                             const NewtonConfig& config = {});

/// Full subject-level L_{1,i} including the l = 0 term, so values are
/// comparable across candidate clusters.
double subject_l1(const SubjectProblem& problem, std::span<const double> v);

/// Subject-level count loss sum_r |N_{i,r} - Lambda_k|^2.
double subject_l2(const SpectralData& data, int subject, double lambda);

struct Assignment {
  int label = 0;
  std::vector<double> v;
  double criterion = 0.0;  // L_{1,i} + gamma L_{2,i} at the chosen cluster
};

/// Optimizes shifts for every candidate cluster (warm started from the
/// subject's current shifts) and picks the label with the smallest
/// L_{1,i} + gamma L_{2,i}; ties break to the smallest label. When
/// fix_shifts is true the current shifts are kept and only the label is
/// chosen.
Assignment assign_cluster(const SpectralData& data, int subject, const ModelParams& params,
                          double gamma, const NewtonConfig& config, bool fix_shifts = false);

struct ClusteringResult {
  std::vector<int> z;
  std::vector<double> v;
  std::vector<double> criterion;  // per subject
};

/// Applies assign_cluster to every subject independently (parallel map
/// with deterministic output ordering).
ClusteringResult clustering_step(const SpectralData& data, const ModelParams& params,
                                 double gamma, const NewtonConfig& config, int threads = 1,
                                 bool fix_shifts = false);

}  // namespace asimm
