#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "asimm/event_data.hpp"
#include "asimm/spectral.hpp"

namespace asimm {

/// Fitted parameters: cluster labels z (0-based, size n), normalized
/// baselines a'_k, normalized component curves f'_{k,m} as SpectralCurve,
/// subject shifts v (n x M, seconds), and expected counts Lambda_k.
/// After each centering step T*a'_k + T*sum_m phi'_{k,m,0} = 1.
struct ModelParams {
  int K = 0;
  int M = 0;
  int ell0 = 0;
  double horizon = 0.0;
  std::vector<int> z;                 // size n
  std::vector<double> a_prime;        // size K
  std::vector<SpectralCurve> phi;     // size K*M, index k*M + m
  std::vector<double> v;              // size n*M, index i*M + m
  std::vector<double> lambda;         // size K

  int n() const { return static_cast<int>(z.size()); }
  const SpectralCurve& component(int k, int m) const {
    return phi[static_cast<std::size_t>(k) * M + m];
  }
  double shift(int i, int m) const { return v[static_cast<std::size_t>(i) * M + m]; }

  /// Un-normalized views: a_k = a'_k Lambda_k and f_{k,m} = Lambda_k f'_{k,m}.
  double baseline(int k) const { return a_prime[static_cast<std::size_t>(k)] * lambda[static_cast<std::size_t>(k)]; }
  SpectralCurve component_unnormalized(int k, int m) const;
};

struct NewtonConfig {
  int max_iters = 20;
  double grad_tol = 1e-8;
};

struct FitConfig {
  int K = 1;
  double gamma = 0.0;
  int ell0 = 10;
  double epsilon = 0.005;
  int max_outer_iters = 50;
  NewtonConfig newton;
  WeightMode weight_mode = WeightMode::Count;
  std::uint64_t seed = 0;
  int restarts = 1;
  int threads = 1;
  int init_bins = 64;
  double elbow_drop = 0.10;   // relative-drop threshold for elbow rules
  double gamma_band = 0.05;   // flatness band for the gamma rule
  /// When set (size n*M), shifts are fixed to these values and shift
  /// optimization is skipped entirely.
  std::optional<std::vector<double>> fixed_shifts;

  void check() const;  // throws std::invalid_argument on bad bounds
};

/// Frequency-domain within-cluster variance of event time distributions,
/// summed over |l| <= ell0:
///   sum_{i,r} beta_{i,r} sum_l | eta_{i,r,l}/N - model_{i,r,l} |^2,
/// model_{i,r,l} = a'_{z_i} 1(l=0)
///               + sum_m exp(-j 2 pi l (v_{i,m}+w*_{r,m})/T) phi'_{z_i,m,l}.
/// Empty observations contribute 0. Truncation means values are comparable
/// only at fixed ell0; the omitted |l| > ell0 tail is parameter-independent.
double loss_l1(const SpectralData& data, const ModelParams& params, int threads = 1);

/// Within-cluster variance of event counts: sum_{i,r} |N_{i,r} - Lambda_{z_i}|^2.
double loss_l2(const SpectralData& data, const ModelParams& params);

/// loss_l1 + gamma * loss_l2.
double objective(const SpectralData& data, const ModelParams& params, double gamma,
                 int threads = 1);

}  // namespace asimm
