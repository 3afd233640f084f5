#include "asimm/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace asimm {

namespace {

constexpr double kSymmetryTol = 1e-8;

void check_symmetry(std::span<const Complex> coeffs, int ell0) {
  for (int l = 1; l <= ell0; ++l) {
    Complex pos = coeffs[static_cast<std::size_t>(ell0 + l)];
    Complex neg = coeffs[static_cast<std::size_t>(ell0 - l)];
    double err = std::abs(neg - std::conj(pos));
    if (err > kSymmetryTol * std::max(1.0, std::abs(pos))) {
      throw std::invalid_argument("SpectralCurve: conjugate symmetry violated at |l|=" +
                                  std::to_string(l));
    }
  }
  if (std::abs(coeffs[static_cast<std::size_t>(ell0)].imag()) > kSymmetryTol) {
    throw std::invalid_argument("SpectralCurve: DC coefficient must be real");
  }
}

}  // namespace

SpectralCurve::SpectralCurve(std::vector<Complex> coefficients, double horizon)
    : coeffs_(std::move(coefficients)), horizon_(horizon) {
  if (horizon_ <= 0.0) throw std::invalid_argument("SpectralCurve: horizon must be positive");
  if (coeffs_.empty() || coeffs_.size() % 2 == 0) {
    throw std::invalid_argument("SpectralCurve: coefficient count must be odd (2*ell0+1)");
  }
  ell0_ = static_cast<int>(coeffs_.size() / 2);
  check_symmetry(coeffs_, ell0_);
}

SpectralCurve SpectralCurve::zero(int ell0, double horizon) {
  if (ell0 < 0) throw std::invalid_argument("SpectralCurve: ell0 must be >= 0");
  return SpectralCurve(std::vector<Complex>(static_cast<std::size_t>(2 * ell0 + 1)), horizon);
}

double SpectralCurve::evaluate(double t) const {
  // phi_0 + 2 sum_{l>=1} Re(phi_l e^{j 2 pi l t / T}); exact for symmetric
  // coefficients and avoids the mirrored half of the sum.
  double base = 2.0 * std::numbers::pi * t / horizon_;
  double acc = coeff(0).real();
  for (int l = 1; l <= ell0_; ++l) {
    Complex rot(std::cos(l * base), std::sin(l * base));
    acc += 2.0 * (coeff(l) * rot).real();
  }
  return acc;
}

SpectralCurve shift_phase(const SpectralCurve& curve, double v) {
  int ell0 = curve.ell0();
  std::vector<Complex> out(static_cast<std::size_t>(2 * ell0 + 1));
  double base = -2.0 * std::numbers::pi * v / curve.horizon();
  for (int l = -ell0; l <= ell0; ++l) {
    Complex phase(std::cos(l * base), std::sin(l * base));
    out[static_cast<std::size_t>(l + ell0)] = phase * curve.coeff(l);
  }
  return SpectralCurve(std::move(out), curve.horizon());
}

std::vector<double> synthesize(const SpectralCurve& curve, int grid_size) {
  int ell0 = curve.ell0();
  if (grid_size < 2 * ell0 + 1) {
    throw std::invalid_argument("synthesize: grid_size must be >= 2*ell0+1");
  }
  check_symmetry(curve.coeffs(), ell0);
  std::vector<double> samples(static_cast<std::size_t>(grid_size));
  double step = curve.horizon() / grid_size;
  for (int g = 0; g < grid_size; ++g) {
    samples[static_cast<std::size_t>(g)] = curve.evaluate(g * step);
  }
  return samples;
}

double l2_inner(const SpectralCurve& a, const SpectralCurve& b) {
  if (a.ell0() != b.ell0() || a.horizon() != b.horizon()) {
    throw std::invalid_argument("l2_inner: mismatched ell0 or horizon");
  }
  double acc = 0.0;
  for (int l = -a.ell0(); l <= a.ell0(); ++l) {
    acc += (a.coeff(l) * std::conj(b.coeff(l))).real();
  }
  return a.horizon() * acc;
}

}  // namespace asimm
