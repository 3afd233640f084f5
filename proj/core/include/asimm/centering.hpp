#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "asimm/event_data.hpp"
#include "asimm/spectral.hpp"

namespace asimm {

class EmptyClusterError : public std::runtime_error {
 public:
  explicit EmptyClusterError(int cluster)
      : std::runtime_error("empty cluster at centering"), cluster_(cluster) {}
  int cluster() const { return cluster_; }

 private:
  int cluster_;
};

/// Weighted least-squares system for one (cluster, frequency) pair.
/// Rows run over the cluster's (i, r) cells with beta > 0; design entries
/// are the unit-modulus phases exp(-j 2 pi l (v_{i,m}+w*_{r,m})/T).
struct FrequencySystem {
  int rows = 0;
  int M = 0;
  std::vector<Complex> design;    // row-major rows x M
  std::vector<double> weights;    // beta per row
  std::vector<Complex> response;  // eta/N per row
};

FrequencySystem build_frequency_system(const SpectralData& data, std::span<const int> z,
                                       std::span<const double> v, int k, int l);

/// Weighted least-squares minimizer phi'_{k,*,l} = (E^H B E)^{-1} (E^H B h)
/// for l != 0. If the normal matrix condition number exceeds 1e10 the solve
/// falls back to a ridge of 1e-8 * trace/M and *ill_conditioned is set.
/// Throws EmptyClusterError when the system has no rows.
std::vector<Complex> solve_component_coeffs(const FrequencySystem& system,
                                            bool* ill_conditioned = nullptr);

/// DC coefficients from the zero-at-origin constraint:
/// phi'_{m,0} = -sum_{l != 0} phi'_{m,l}, one value per component curve.
/// The DC slots of the inputs are ignored.
std::vector<Complex> dc_constraint(std::span<const SpectralCurve> components);

/// Baseline for one cluster: a' = 1/T - sum_m phi'_{m,0}. Negative values
/// are permitted (flagged by the caller).
double update_baseline(std::span<const SpectralCurve> components, double horizon);

/// Per-cluster mean of N_{i,r}(T). Throws EmptyClusterError for clusters
/// with no members.
std::vector<double> update_lambda(const SpectralData& data, std::span<const int> z, int K);

struct CenteringResult {
  std::vector<double> a_prime;                     // K
  std::vector<SpectralCurve> phi;                  // K*M
  std::vector<double> lambda;                      // K
  std::vector<std::pair<int, int>> ill_conditioned;  // flagged (k, l)
  std::vector<int> negative_baseline;              // flagged k
};

/// Closed-form update of (a', phi', Lambda) given labels and shifts: for
/// fixed (z, v) this globally minimizes L1 over the band-limited family
/// under the zero-at-origin constraint, and L2 over Lambda.
CenteringResult centering_step(const SpectralData& data, std::span<const int> z,
                               std::span<const double> v, int K, int threads = 1);

}  // namespace asimm
