#pragma once

#include <complex>
#include <span>
#include <vector>

namespace asimm {

using Complex = std::complex<double>;

/// Band-limited real curve on [0, T], stored as the truncated Fourier
/// coefficient sequence phi_l for l in {-ell0, ..., ell0}. Synthesis uses
/// f(t) = sum_l phi_l exp(j 2 pi l t / T). Coefficients for negative l are
/// stored explicitly; conjugate symmetry phi_{-l} = conj(phi_l) is checked
/// on construction so a real time signal is guaranteed.
class SpectralCurve {
 public:
  SpectralCurve(std::vector<Complex> coefficients, double horizon);

  /// All-zero curve with the given truncation.
  static SpectralCurve zero(int ell0, double horizon);

  int ell0() const { return ell0_; }
  double horizon() const { return horizon_; }

  /// Coefficient at frequency index l, |l| <= ell0.
  Complex coeff(int l) const { return coeffs_[static_cast<std::size_t>(l + ell0_)]; }
  void set_coeff(int l, Complex value) { coeffs_[static_cast<std::size_t>(l + ell0_)] = value; }

  std::span<const Complex> coeffs() const { return coeffs_; }

  /// Pointwise value at time t (exact trigonometric sum, real by symmetry).
  double evaluate(double t) const;

 private:
  std::vector<Complex> coeffs_;  // index l + ell0
  int ell0_;
  double horizon_;
};

/// Time shift by v seconds: phi_l -> exp(-j 2 pi l v / T) phi_l. The DC
/// coefficient is unchanged and shifting by T is the identity.
SpectralCurve shift_phase(const SpectralCurve& curve, double v);

/// Samples the curve on a uniform grid of grid_size points over [0, T).
/// Requires grid_size >= 2*ell0 + 1. Throws if the stored coefficients
/// violate conjugate symmetry beyond 1e-8; residual imaginary parts below
/// 1e-10 are dropped.
std::vector<double> synthesize(const SpectralCurve& curve, int grid_size = 1024);

/// L2 inner product over [0, T] via Parseval:
/// T * Re(sum_l phi_a,l conj(phi_b,l)). Throws on mismatched ell0 or T.
double l2_inner(const SpectralCurve& a, const SpectralCurve& b);

}  // namespace asimm
