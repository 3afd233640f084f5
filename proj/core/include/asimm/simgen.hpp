#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "asimm/event_data.hpp"

namespace asimm {

/// One additive term of an intensity component: coef * q_base(scale * (t - offset)),
/// where q_base is one of the two unit-mass template densities below.
struct ComponentTerm {
  int base = 1;        // 1 or 2
  double coef = 0.0;   // events/sec multiplier (may be negative)
  double scale = 1.0;  // time rescaling inside the template argument
  double offset = 0.0; // time offset inside the template argument
};

/// Template density q1: (2 - 2cos(4 pi (t - 0.4))) on [0.4, 0.9], else 0.
double q1(double t);
/// Template density q2: (2 - 2cos(2 pi sqrt(2 t))) on [0, 0.5], else 0.
double q2(double t);

/// Closed-form intensity component: sum of terms, with an upper bound for
/// thinning derived from the template maxima (both q1 and q2 peak at 4).
struct IntensityComponent {
  std::vector<ComponentTerm> terms;

  double evaluate(double t) const;
  double upper_bound() const;  // sum of max(coef, 0) * 4 * max template value
  double mass() const;         // exact integral over the support
};

/// Generating model for one synthetic experiment: per-cluster baselines
/// and components plus the true memberships and shifts used for a draw.
struct GroundTruth {
  int K = 0;
  int M = 0;
  double horizon = 0.0;
  double tau = 0.0;
  double rho = 0.0;
  int scenario = 0;
  std::vector<int> z;                          // size n
  std::vector<double> v;                       // n x M
  std::vector<double> w;                       // R x M (same as dataset shifts)
  std::vector<double> baseline;                // size K
  std::vector<double> lambda;                  // size K
  std::vector<IntensityComponent> components;  // K x M, index k*M + m

  const IntensityComponent& component(int k, int m) const {
    return components[static_cast<std::size_t>(k) * M + m];
  }
  /// lambda_{i,r}(t) = a_{z_i} + sum_m f_{z_i,m}(t - v_{i,m} - w*_{r,m}).
  double intensity(int i, int r, double t) const;
};

/// Inhomogeneous Poisson draw on [0, T] by thinning against rate_bound.
/// Throws if the intensity exceeds the bound at any proposal.
EventTimes sample_poisson(const std::function<double(double)>& intensity, double horizon,
                          double rate_bound, class CounterRng& rng);

/// Single-cluster experiment: a = 20, f1 = 70 q1, f2 = 70 q2, T = 2.5,
/// v_{i,1} ~ U(0, 1/64), v_{i,2} ~ U(0, 1/16), w*_1 ~ U(0, tau),
/// w*_2 ~ U(0.8, 0.8 + tau).
std::pair<Dataset, GroundTruth> scenario1(int n, int R, double tau, std::uint64_t seed,
                                          std::uint64_t replicate = 0);

/// Four-cluster experiment with sequential equal-size memberships
/// z_i = ceil((i/n) K) and components controlled by the separation
/// parameter rho in [0, 1].
std::pair<Dataset, GroundTruth> scenario2(int n, int R, double tau, double rho,
                                          std::uint64_t seed, std::uint64_t replicate = 0);

}  // namespace asimm
