#include "asimm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace asimm {

namespace {

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

/// Golden-section minimization of a unimodal bracket [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol,
                  double* arg_out) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  double mid = (a + b) / 2.0;
  if (arg_out) *arg_out = mid;
  return f(mid);
}

/// Coarse scan over v in [-T, T] with step T/512 using circular rolls of
/// precomputed samples, then golden refinement via `exact` around the best
/// cell. grid must be a multiple of 512.
AlignResult aligned_search(std::span<const double> est, std::span<const double> tgt,
                           double horizon, const std::function<double(double)>& exact) {
  const int G = static_cast<int>(est.size());
  const int cells_per_step = G / 512;
  const double quad_scale = horizon / G;

  double best_err = std::numeric_limits<double>::infinity();
  int best_c = 0;
  for (int c = -512; c <= 512; ++c) {
    int roll = c * cells_per_step;
    double acc = 0.0;
    for (int g = 0; g < G; ++g) {
      int src = g - roll;
      src %= G;
      if (src < 0) src += G;
      double diff = est[static_cast<std::size_t>(src)] - tgt[static_cast<std::size_t>(g)];
      acc += diff * diff;
    }
    acc *= quad_scale;
    if (acc < best_err) {
      best_err = acc;
      best_c = c;
    }
  }
  double v0 = best_c * horizon / 512.0;
  double step = horizon / 512.0;
  AlignResult result;
  double refined = golden_min(exact, v0 - step, v0 + step, horizon * 1e-5, &result.shift);
  if (refined <= best_err) {
    result.distance = refined;
  } else {
    result.distance = best_err;
    result.shift = v0;
  }
  return result;
}

std::vector<double> sample_target(const std::function<double(double)>& target, double horizon,
                                  int grid_size) {
  std::vector<double> tgt(static_cast<std::size_t>(grid_size));
  for (int g = 0; g < grid_size; ++g) {
    tgt[static_cast<std::size_t>(g)] = target(g * horizon / grid_size);
  }
  return tgt;
}

long long pairs2(long long x) { return x * (x - 1) / 2; }

}  // namespace

double shift_error(const SpectralCurve& estimate, const std::function<double(double)>& target,
                   double v, int grid_size) {
  const double T = estimate.horizon();
  SpectralCurve shifted = shift_phase(estimate, v);
  double acc = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    double t = g * T / grid_size;
    double diff = shifted.evaluate(t) - target(t);
    acc += diff * diff;
  }
  return acc * T / grid_size;
}

AlignResult shift_aligned_distance(const SpectralCurve& estimate,
                                   const std::function<double(double)>& target, int grid_size) {
  if (grid_size < 512 || grid_size % 512 != 0) {
    throw std::invalid_argument("shift_aligned_distance: grid_size must be a multiple of 512");
  }
  const double T = estimate.horizon();
  std::vector<double> est = synthesize(estimate, grid_size);
  std::vector<double> tgt = sample_target(target, T, grid_size);
  return aligned_search(est, tgt, T,
                        [&](double v) { return shift_error(estimate, target, v, grid_size); });
}

AlignResult shift_aligned_distance(std::span<const double> estimate_samples, double horizon,
                                   const std::function<double(double)>& target) {
  const int G = static_cast<int>(estimate_samples.size());
  if (G < 512 || G % 512 != 0) {
    throw std::invalid_argument("shift_aligned_distance: sample count must be a multiple of 512");
  }
  std::vector<double> tgt = sample_target(target, horizon, G);
  // Off-grid shifts via linear interpolation between circular rolls.
  auto exact = [&](double v) {
    double acc = 0.0;
    double cells = v * G / horizon;
    double fl = std::floor(cells);
    double frac = cells - fl;
    long long base = static_cast<long long>(fl);
    for (int g = 0; g < G; ++g) {
      long long src = (g - base) % G;
      if (src < 0) src += G;
      long long src2 = src == 0 ? G - 1 : src - 1;
      double val = (1.0 - frac) * estimate_samples[static_cast<std::size_t>(src)] +
                   frac * estimate_samples[static_cast<std::size_t>(src2)];
      double diff = val - tgt[static_cast<std::size_t>(g)];
      acc += diff * diff;
    }
    return acc * horizon / G;
  };
  return aligned_search(estimate_samples, tgt, horizon, exact);
}

double mise(std::span<const SpectralCurve> estimate_components,
            const std::vector<std::function<double(double)>>& true_components,
            double true_lambda) {
  if (estimate_components.size() != true_components.size()) {
    throw std::invalid_argument("mise: component count mismatch");
  }
  double acc = 0.0;
  for (std::size_t m = 0; m < true_components.size(); ++m) {
    const auto& truth = true_components[m];
    auto normalized = [&truth, true_lambda](double t) { return truth(t) / true_lambda; };
    acc += shift_aligned_distance(estimate_components[m], normalized).distance;
  }
  return acc / static_cast<double>(true_components.size());
}

std::vector<std::vector<long long>> contingency(std::span<const int> labels_a,
                                                std::span<const int> labels_b) {
  if (labels_a.size() != labels_b.size()) throw std::invalid_argument("contingency: length mismatch");
  int ka = 0, kb = 0;
  for (int x : labels_a) ka = std::max(ka, x + 1);
  for (int x : labels_b) kb = std::max(kb, x + 1);
  std::vector<std::vector<long long>> table(static_cast<std::size_t>(ka),
                                            std::vector<long long>(static_cast<std::size_t>(kb), 0));
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    if (labels_a[i] < 0 || labels_b[i] < 0) throw std::invalid_argument("contingency: negative label");
    ++table[static_cast<std::size_t>(labels_a[i])][static_cast<std::size_t>(labels_b[i])];
  }
  return table;
}

double ari(std::span<const int> labels_a, std::span<const int> labels_b) {
  if (labels_a.size() != labels_b.size()) throw std::invalid_argument("ari: length mismatch");
  if (labels_a.size() < 2) throw std::invalid_argument("ari: need at least two items");
  auto table = contingency(labels_a, labels_b);

  long long index = 0, sum_a = 0, sum_b = 0;
  std::vector<long long> row_tot(table.size(), 0);
  std::vector<long long> col_tot(table.empty() ? 0 : table[0].size(), 0);
  for (std::size_t k = 0; k < table.size(); ++k) {
    for (std::size_t kp = 0; kp < table[k].size(); ++kp) {
      index += pairs2(table[k][kp]);
      row_tot[k] += table[k][kp];
      col_tot[kp] += table[k][kp];
    }
  }
  for (long long b : row_tot) sum_a += pairs2(b);
  for (long long c : col_tot) sum_b += pairs2(c);
  long long total = pairs2(static_cast<long long>(labels_a.size()));

  long double expected = static_cast<long double>(sum_a) * sum_b / total;
  long double maximum = (static_cast<long double>(sum_a) + sum_b) / 2.0L;
  long double denom = maximum - expected;
  if (denom == 0.0L) {
    // Both partitions all-singletons or both single-cluster: identical.
    return 1.0;
  }
  return static_cast<double>((static_cast<long double>(index) - expected) / denom);
}

std::vector<int> best_label_permutation(std::span<const int> truth, std::span<const int> estimate,
                                        int K) {
  auto table = contingency(estimate, truth);
  // Pad to K x K so permutations are well defined.
  table.resize(static_cast<std::size_t>(K));
  for (auto& row : table) row.resize(static_cast<std::size_t>(K), 0);

  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  long long best_score = -1;
  do {
    long long score = 0;
    for (int k = 0; k < K; ++k) {
      score += table[static_cast<std::size_t>(k)][static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    }
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace asimm
