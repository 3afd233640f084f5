#pragma once

#include <functional>
#include <span>
#include <vector>

#include "asimm/spectral.hpp"

namespace asimm {

struct AlignResult {
  double distance = 0.0;
  double shift = 0.0;  // minimizing v
};

/// Squared L2 error over [0, T] between the estimate shifted by v and the
/// target, by rectangle quadrature on grid_size points. The estimate is
/// treated as T-periodic under shifting.
double shift_error(const SpectralCurve& estimate, const std::function<double(double)>& target,
                   double v, int grid_size = 2048);

/// d{f1, f2} = min over v in [-T, T] of ||S^v f1 - f2||^2, by a coarse
/// grid of step T/512 followed by golden-section refinement to T * 1e-5.
AlignResult shift_aligned_distance(const SpectralCurve& estimate,
                                   const std::function<double(double)>& target,
                                   int grid_size = 2048);

/// Grid-sample variant: the estimate is given as uniform samples over
/// [0, T) and shifted by circular rolls with linear interpolation.
AlignResult shift_aligned_distance(std::span<const double> estimate_samples, double horizon,
                                   const std::function<double(double)>& target);

/// Mean over components of the aligned distance between the normalized
/// estimated components and f*_m / Lambda*.
double mise(std::span<const SpectralCurve> estimate_components,
            const std::vector<std::function<double(double)>>& true_components,
            double true_lambda);

/// Adjusted Rand Index from exact integer pair counts. Equals 1 iff the
/// partitions agree up to relabeling; throws on length mismatch or fewer
/// than two items.
double ari(std::span<const int> labels_a, std::span<const int> labels_b);

/// Contingency counts d_{k,k'} = |C_k ∩ C'_k'| as a dense matrix.
std::vector<std::vector<long long>> contingency(std::span<const int> labels_a,
                                                std::span<const int> labels_b);

/// Label permutation of the estimate maximizing agreement with the truth
/// (brute force over K! for the small K used here). Returns sigma such
/// that estimated label k matches true label sigma[k].
std::vector<int> best_label_permutation(std::span<const int> truth, std::span<const int> estimate,
                                        int K);

}  // namespace asimm
