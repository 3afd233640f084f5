#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "asimm/event_data.hpp"
#include "asimm/rng.hpp"
#include "asimm/spectral.hpp"

namespace test_support {

/// Conjugate-symmetric coefficient vector with entries of the given scale.
inline std::vector<asimm::Complex> random_symmetric(asimm::CounterRng& rng, int ell0,
                                                    double scale, bool zero_dc = false) {
  std::vector<asimm::Complex> coeffs(static_cast<std::size_t>(2 * ell0 + 1));
  coeffs[static_cast<std::size_t>(ell0)] =
      asimm::Complex(zero_dc ? 0.0 : scale * rng.uniform(-1.0, 1.0), 0.0);
  for (int l = 1; l <= ell0; ++l) {
    asimm::Complex c(scale * rng.uniform(-1.0, 1.0), scale * rng.uniform(-1.0, 1.0));
    coeffs[static_cast<std::size_t>(ell0 + l)] = c;
    coeffs[static_cast<std::size_t>(ell0 - l)] = std::conj(c);
  }
  return coeffs;
}

/// Composite Simpson quadrature over [0, T].
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  double h = (hi - lo) / intervals;
  double acc = f(lo) + f(hi);
  for (int j = 1; j < intervals; ++j) {
    acc += f(lo + j * h) * (j % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

/// Midpoint-free rectangle rule on a uniform grid over [0, T): used where
/// the integrand is (nearly) band-limited and the rule is spectrally exact.
inline double rectangle(const std::function<double(double)>& f, double horizon, int bins) {
  double acc = 0.0;
  for (int g = 0; g < bins; ++g) acc += f(g * horizon / bins);
  return acc * horizon / bins;
}

/// Synthetic SpectralData built directly from supplied normalized rows:
/// eta_{i,r,l} = normalized * N with eta_0 pinned to N/T.
struct SyntheticSpectralBuilder {
  int n, R, M, ell0;
  double horizon;
  std::vector<asimm::Complex> normalized_rows;  // per cell, 2*ell0+1 values (DC overwritten)
  std::vector<double> counts;
  std::vector<double> shifts;  // R x M

  asimm::SpectralData build(asimm::WeightMode mode = asimm::WeightMode::Count) const {
    asimm::SpectralData data;
    data.n = n;
    data.R = R;
    data.M = M;
    data.ell0 = ell0;
    data.horizon = horizon;
    data.shifts = shifts;
    std::size_t cells = static_cast<std::size_t>(n) * R;
    std::size_t len = static_cast<std::size_t>(2 * ell0 + 1);
    data.eta.resize(cells * len);
    data.normalized.resize(cells * len);
    data.counts = counts;
    data.weights.resize(cells);
    data.empty.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      double count = counts[c];
      bool is_empty = count == 0.0;
      data.empty[c] = is_empty ? 1 : 0;
      data.weights[c] = is_empty ? 0.0 : (mode == asimm::WeightMode::Count ? count : 1.0);
      for (std::size_t j = 0; j < len; ++j) {
        asimm::Complex norm = normalized_rows[c * len + j];
        if (j == static_cast<std::size_t>(ell0)) norm = asimm::Complex(1.0 / horizon, 0.0);
        if (is_empty) norm = asimm::Complex(0.0, 0.0);
        data.normalized[c * len + j] = norm;
        data.eta[c * len + j] = norm * count;
      }
    }
    return data;
  }
};

}  // namespace test_support
