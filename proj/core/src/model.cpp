#include "asimm/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "asimm/parallel.hpp"

namespace asimm {

SpectralCurve ModelParams::component_unnormalized(int k, int m) const {
  const SpectralCurve& c = component(k, m);
  std::vector<Complex> scaled(c.coeffs().begin(), c.coeffs().end());
  for (auto& x : scaled) x *= lambda[static_cast<std::size_t>(k)];
  return SpectralCurve(std::move(scaled), c.horizon());
}

void FitConfig::check() const {
  if (K < 1) throw std::invalid_argument("FitConfig: K must be >= 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("FitConfig: gamma must be >= 0");
  if (ell0 < 1) throw std::invalid_argument("FitConfig: ell0 must be >= 1");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("FitConfig: epsilon must be >= 0");
  if (max_outer_iters < 1) throw std::invalid_argument("FitConfig: max_outer_iters must be >= 1");
  if (newton.max_iters < 0) throw std::invalid_argument("FitConfig: newton.max_iters must be >= 0");
  if (!(newton.grad_tol > 0.0)) throw std::invalid_argument("FitConfig: newton.grad_tol must be > 0");
  // restarts == 0 is reserved for fitting from a supplied start only.
  if (restarts < 0) throw std::invalid_argument("FitConfig: restarts must be >= 0");
  if (init_bins < 1) throw std::invalid_argument("FitConfig: init_bins must be >= 1");
}

namespace {

void check_dims(const SpectralData& data, const ModelParams& params) {
  if (params.n() != data.n || params.M != data.M || params.ell0 != data.ell0 ||
      params.horizon != data.horizon ||
      params.phi.size() != static_cast<std::size_t>(params.K) * params.M ||
      params.a_prime.size() != static_cast<std::size_t>(params.K) ||
      params.lambda.size() != static_cast<std::size_t>(params.K) ||
      params.v.size() != static_cast<std::size_t>(data.n) * data.M) {
    throw std::invalid_argument("loss: params dimensions do not match data");
  }
  for (int label : params.z) {
    if (label < 0 || label >= params.K) throw std::invalid_argument("loss: label out of range");
  }
}

/// One observation's L1 contribution (all |l| <= ell0 including DC).
double cell_l1(const SpectralData& data, const ModelParams& params, int i, int r) {
  double beta = data.weight_at(i, r);
  if (beta == 0.0) return 0.0;
  const int k = params.z[static_cast<std::size_t>(i)];
  const int ell0 = data.ell0;
  const double T = data.horizon;
  const double two_pi = 2.0 * std::numbers::pi;

  // DC residual: eta_0/N - (a' + sum_m phi'_{m,0}).
  Complex dc = data.norm_at(i, r, 0) - Complex(params.a_prime[static_cast<std::size_t>(k)], 0.0);
  for (int m = 0; m < data.M; ++m) dc -= params.component(k, m).coeff(0);
  double acc = std::norm(dc);

  // l != 0 terms come in conjugate pairs; sum l >= 1 and double.
  for (int l = 1; l <= ell0; ++l) {
    Complex model(0.0, 0.0);
    for (int m = 0; m < data.M; ++m) {
      double phase = -two_pi * l * (params.shift(i, m) + data.shift(r, m)) / T;
      model += Complex(std::cos(phase), std::sin(phase)) * params.component(k, m).coeff(l);
    }
    acc += 2.0 * std::norm(data.norm_at(i, r, l) - model);
  }
  return beta * acc;
}

}  // namespace

double loss_l1(const SpectralData& data, const ModelParams& params, int threads) {
  check_dims(data, params);
  std::size_t cells = static_cast<std::size_t>(data.n) * data.R;
  std::vector<double> terms(cells);
  parallel_for(cells, threads, [&](std::size_t c) {
    int i = static_cast<int>(c / data.R);
    int r = static_cast<int>(c % data.R);
    terms[c] = cell_l1(data, params, i, r);
  });
  return pairwise_sum(terms);
}

double loss_l2(const SpectralData& data, const ModelParams& params) {
  check_dims(data, params);
  std::size_t cells = static_cast<std::size_t>(data.n) * data.R;
  std::vector<double> terms(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    int i = static_cast<int>(c / data.R);
    double d = data.counts[c] - params.lambda[static_cast<std::size_t>(params.z[static_cast<std::size_t>(i)])];
    terms[c] = d * d;
  }
  return pairwise_sum(terms);
}

double objective(const SpectralData& data, const ModelParams& params, double gamma, int threads) {
  return loss_l1(data, params, threads) + gamma * loss_l2(data, params);
}

}  // namespace asimm
