#include "asimm/centering.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "asimm/parallel.hpp"

namespace asimm {

namespace {

constexpr double kConditionLimit = 1e10;
constexpr double kRidgeScale = 1e-8;

}  // namespace

FrequencySystem build_frequency_system(const SpectralData& data, std::span<const int> z,
                                       std::span<const double> v, int k, int l) {
  FrequencySystem sys;
  sys.M = data.M;
  const double T = data.horizon;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < data.n; ++i) {
    if (z[static_cast<std::size_t>(i)] != k) continue;
    for (int r = 0; r < data.R; ++r) {
      double beta = data.weight_at(i, r);
      if (beta == 0.0) continue;
      for (int m = 0; m < data.M; ++m) {
        double phase = -two_pi * l * (v[static_cast<std::size_t>(i) * data.M + m] + data.shift(r, m)) / T;
        sys.design.push_back(Complex(std::cos(phase), std::sin(phase)));
      }
      sys.weights.push_back(beta);
      sys.response.push_back(data.norm_at(i, r, l));
      ++sys.rows;
    }
  }
  return sys;
}

std::vector<Complex> solve_component_coeffs(const FrequencySystem& system, bool* ill_conditioned) {
  if (ill_conditioned) *ill_conditioned = false;
  if (system.rows == 0) throw EmptyClusterError(-1);
  const int M = system.M;

  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> E(
      system.design.data(), system.rows, M);
  Eigen::Map<const Eigen::VectorXd> b(system.weights.data(), system.rows);
  Eigen::Map<const Eigen::VectorXcd> h(system.response.data(), system.rows);

  Eigen::VectorXcd bc = b.cast<Complex>();
  Eigen::MatrixXcd normal = E.adjoint() * bc.asDiagonal() * E;
  Eigen::VectorXcd rhs = E.adjoint() * bc.cwiseProduct(h);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(normal);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(M - 1);
  if (smin <= 0.0 || smax / smin > kConditionLimit) {
    if (ill_conditioned) *ill_conditioned = true;
    double ridge = kRidgeScale * normal.real().trace() / M;
    normal += ridge * Eigen::MatrixXcd::Identity(M, M);
  }
  Eigen::VectorXcd phi = normal.ldlt().solve(rhs);
  return std::vector<Complex>(phi.data(), phi.data() + M);
}

std::vector<Complex> dc_constraint(std::span<const SpectralCurve> components) {
  std::vector<Complex> dc(components.size());
  for (std::size_t m = 0; m < components.size(); ++m) {
    const SpectralCurve& c = components[m];
    Complex acc(0.0, 0.0);
    for (int l = 1; l <= c.ell0(); ++l) {
      acc += c.coeff(l) + c.coeff(-l);
    }
    dc[m] = -acc;
  }
  return dc;
}

double update_baseline(std::span<const SpectralCurve> components, double horizon) {
  double acc = 1.0 / horizon;
  for (const SpectralCurve& c : components) acc -= c.coeff(0).real();
  return acc;
}

std::vector<double> update_lambda(const SpectralData& data, std::span<const int> z, int K) {
  std::vector<double> sums(static_cast<std::size_t>(K), 0.0);
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(K), 0);
  for (int i = 0; i < data.n; ++i) {
    int k = z[static_cast<std::size_t>(i)];
    for (int r = 0; r < data.R; ++r) {
      sums[static_cast<std::size_t>(k)] += data.count_at(i, r);
      ++sizes[static_cast<std::size_t>(k)];
    }
  }
  for (int k = 0; k < K; ++k) {
    if (sizes[static_cast<std::size_t>(k)] == 0) throw EmptyClusterError(k);
    sums[static_cast<std::size_t>(k)] /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
  }
  return sums;
}

CenteringResult centering_step(const SpectralData& data, std::span<const int> z,
                               std::span<const double> v, int K, int threads) {
  const int M = data.M;
  const int ell0 = data.ell0;
  const int L = 2 * ell0 + 1;

  // Cluster occupancy check up front so the error carries the cluster index.
  {
    std::vector<int> members(static_cast<std::size_t>(K), 0);
    for (int i = 0; i < data.n; ++i) ++members[static_cast<std::size_t>(z[static_cast<std::size_t>(i)])];
    for (int k = 0; k < K; ++k) {
      if (members[static_cast<std::size_t>(k)] == 0) throw EmptyClusterError(k);
    }
  }

  // Solve l = 1..ell0 per cluster and mirror by conjugation; the (k, l)
  // solves are independent pure tasks.
  std::vector<std::vector<Complex>> solved(static_cast<std::size_t>(K) * ell0);
  std::vector<std::uint8_t> flagged(static_cast<std::size_t>(K) * ell0, 0);
  parallel_for(solved.size(), threads, [&](std::size_t task) {
    int k = static_cast<int>(task / ell0);
    int l = static_cast<int>(task % ell0) + 1;
    FrequencySystem sys = build_frequency_system(data, z, v, k, l);
    bool ill = false;
    solved[task] = solve_component_coeffs(sys, &ill);
    flagged[task] = ill ? 1 : 0;
  });

  CenteringResult result;
  result.lambda = update_lambda(data, z, K);
  result.a_prime.resize(static_cast<std::size_t>(K));
  result.phi.reserve(static_cast<std::size_t>(K) * M);

  for (int k = 0; k < K; ++k) {
    std::vector<std::vector<Complex>> coeffs(static_cast<std::size_t>(M),
                                             std::vector<Complex>(static_cast<std::size_t>(L)));
    for (int l = 1; l <= ell0; ++l) {
      std::size_t task = static_cast<std::size_t>(k) * ell0 + (l - 1);
      if (flagged[task]) result.ill_conditioned.emplace_back(k, l);
      for (int m = 0; m < M; ++m) {
        coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(ell0 + l)] = solved[task][static_cast<std::size_t>(m)];
        coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(ell0 - l)] =
            std::conj(solved[task][static_cast<std::size_t>(m)]);
      }
    }
    // DC from the zero-at-origin constraint; real by conjugate symmetry.
    for (int m = 0; m < M; ++m) {
      Complex acc(0.0, 0.0);
      for (int l = 1; l <= ell0; ++l) {
        acc += coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(ell0 + l)] +
               coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(ell0 - l)];
      }
      coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(ell0)] = Complex(-acc.real(), 0.0);
    }
    double a_prime = 1.0 / data.horizon;
    for (int m = 0; m < M; ++m) {
      a_prime -= coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(ell0)].real();
    }
    result.a_prime[static_cast<std::size_t>(k)] = a_prime;
    if (a_prime < 0.0) result.negative_baseline.push_back(k);
    for (int m = 0; m < M; ++m) {
      result.phi.emplace_back(std::move(coeffs[static_cast<std::size_t>(m)]), data.horizon);
    }
  }
  return result;
}

}  // namespace asimm
