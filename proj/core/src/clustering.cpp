#include "asimm/clustering.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "asimm/parallel.hpp"

namespace asimm {

namespace {

constexpr int kMaxBacktracks = 10;

/// Shared per-(r, l) kernel: residual rho = eta/N - sum_m c_m together with
/// the per-component terms c_m; sums only l >= 1 and doubles, using the
/// conjugate symmetry of the +-l pair.
template <typename Body>
void scan_rows(const SubjectProblem& p, std::span<const double> v, Body&& body) {
  const SpectralData& data = *p.data;
  const int M = data.M;
  const int ell0 = data.ell0;
  const double T = data.horizon;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Complex> c(static_cast<std::size_t>(M));
  for (int r = 0; r < data.R; ++r) {
    double beta = data.weight_at(p.subject, r);
    if (beta == 0.0) continue;
    for (int l = 1; l <= ell0; ++l) {
      Complex rho = data.norm_at(p.subject, r, l);
      for (int m = 0; m < M; ++m) {
        double phase = -two_pi * l * (v[static_cast<std::size_t>(m)] + data.shift(r, m)) / T;
        c[static_cast<std::size_t>(m)] =
            Complex(std::cos(phase), std::sin(phase)) * p.components[static_cast<std::size_t>(m)].coeff(l);
        rho -= c[static_cast<std::size_t>(m)];
      }
      body(beta, l, std::span<const Complex>(c), rho);
    }
  }
}

}  // namespace

double q_value(const SubjectProblem& problem, std::span<const double> v) {
  double acc = 0.0;
  scan_rows(problem, v, [&](double beta, int, std::span<const Complex>, Complex rho) {
    acc += beta * 2.0 * std::norm(rho);
  });
  return acc;
}

std::vector<double> q_gradient(const SubjectProblem& problem, std::span<const double> v) {
  const int M = problem.M();
  const double two_pi = 2.0 * std::numbers::pi;
  const double T = problem.horizon();
  std::vector<double> grad(static_cast<std::size_t>(M), 0.0);
  scan_rows(problem, v, [&](double beta, int l, std::span<const Complex> c, Complex rho) {
    double omega = two_pi * l / T;
    for (int m = 0; m < M; ++m) {
      grad[static_cast<std::size_t>(m)] -=
          4.0 * beta * omega * (c[static_cast<std::size_t>(m)] * std::conj(rho)).imag();
    }
  });
  return grad;
}

std::vector<double> q_hessian(const SubjectProblem& problem, std::span<const double> v) {
  const int M = problem.M();
  const double two_pi = 2.0 * std::numbers::pi;
  const double T = problem.horizon();
  std::vector<double> hess(static_cast<std::size_t>(M) * M, 0.0);
  scan_rows(problem, v, [&](double beta, int l, std::span<const Complex> c, Complex rho) {
    double w2 = beta * 4.0 * (two_pi * l / T) * (two_pi * l / T);
    for (int m1 = 0; m1 < M; ++m1) {
      Complex cm1 = c[static_cast<std::size_t>(m1)];
      hess[static_cast<std::size_t>(m1) * M + m1] +=
          w2 * ((cm1 * std::conj(rho)).real() + std::norm(cm1));
      for (int m2 = m1 + 1; m2 < M; ++m2) {
        double off = w2 * (cm1 * std::conj(c[static_cast<std::size_t>(m2)])).real();
        hess[static_cast<std::size_t>(m1) * M + m2] += off;
        hess[static_cast<std::size_t>(m2) * M + m1] += off;
      }
    }
  });
  return hess;
}

double newton_trunc(double x, double horizon) {
  double limit = horizon / 10.0;
  if (x < -limit) return -limit;
  if (x > limit) return limit;
  return x;
}

ShiftOptimum optimize_shifts(const SubjectProblem& problem, std::span<const double> v_init,
                             const NewtonConfig& config) {
  const int M = problem.M();
  const double T = problem.horizon();
  ShiftOptimum result;
  result.v.assign(v_init.begin(), v_init.end());
  result.q = q_value(problem, result.v);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    std::vector<double> grad = q_gradient(problem, result.v);
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm < config.grad_tol) break;
    result.iterations = iter + 1;

    std::vector<double> hess = q_hessian(problem, result.v);
    Eigen::Map<const Eigen::MatrixXd> H(hess.data(), M, M);
    Eigen::Map<const Eigen::VectorXd> g(grad.data(), M);

    // Newton direction from a positive definite Hessian; otherwise a
    // plain gradient step, both clamped coordinate-wise.
    Eigen::VectorXd raw;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() == Eigen::Success) {
      raw = llt.solve(g);
    } else {
      raw = g;
    }
    std::vector<double> disp(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) disp[static_cast<std::size_t>(m)] = -newton_trunc(raw(m), T);

    bool accepted = false;
    double scale = 1.0;
    std::vector<double> candidate(static_cast<std::size_t>(M));
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt) {
      for (int m = 0; m < M; ++m) {
        candidate[static_cast<std::size_t>(m)] =
            result.v[static_cast<std::size_t>(m)] + scale * disp[static_cast<std::size_t>(m)];
      }
      double q_new = q_value(problem, candidate);
      if (q_new < result.q) {
        result.v = candidate;
        result.q = q_new;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // keep previous v; no decrease possible along this step
  }
  return result;
}

double subject_l1(const SubjectProblem& problem, std::span<const double> v) {
  const SpectralData& data = *problem.data;
  double acc = q_value(problem, v);
  // Add the v-independent DC term so values are comparable across clusters.
  Complex model_dc(problem.a_prime, 0.0);
  for (int m = 0; m < data.M; ++m) model_dc += problem.components[static_cast<std::size_t>(m)].coeff(0);
  for (int r = 0; r < data.R; ++r) {
    double beta = data.weight_at(problem.subject, r);
    if (beta == 0.0) continue;
    acc += beta * std::norm(data.norm_at(problem.subject, r, 0) - model_dc);
  }
  return acc;
}

double subject_l2(const SpectralData& data, int subject, double lambda) {
  double acc = 0.0;
  for (int r = 0; r < data.R; ++r) {
    double d = data.count_at(subject, r) - lambda;
    acc += d * d;
  }
  return acc;
}

Assignment assign_cluster(const SpectralData& data, int subject, const ModelParams& params,
                          double gamma, const NewtonConfig& config, bool fix_shifts) {
  const int M = data.M;
  std::span<const double> current(params.v.data() + static_cast<std::size_t>(subject) * M,
                                  static_cast<std::size_t>(M));
  Assignment best;
  bool first = true;
  for (int k = 0; k < params.K; ++k) {
    SubjectProblem problem{&data, subject, params.a_prime[static_cast<std::size_t>(k)],
                           std::span<const SpectralCurve>(
                               params.phi.data() + static_cast<std::size_t>(k) * M,
                               static_cast<std::size_t>(M))};
    std::vector<double> v_k;
    if (fix_shifts) {
      v_k.assign(current.begin(), current.end());
    } else {
      v_k = optimize_shifts(problem, current, config).v;
    }
    double criterion = subject_l1(problem, v_k) +
                       gamma * subject_l2(data, subject, params.lambda[static_cast<std::size_t>(k)]);
    if (first || criterion < best.criterion) {
      best.label = k;
      best.v = std::move(v_k);
      best.criterion = criterion;
      first = false;
    }
  }
  return best;
}

ClusteringResult clustering_step(const SpectralData& data, const ModelParams& params,
                                 double gamma, const NewtonConfig& config, int threads,
                                 bool fix_shifts) {
  ClusteringResult result;
  result.z.resize(static_cast<std::size_t>(data.n));
  result.v.resize(static_cast<std::size_t>(data.n) * data.M);
  result.criterion.resize(static_cast<std::size_t>(data.n));
  parallel_for(static_cast<std::size_t>(data.n), threads, [&](std::size_t i) {
    Assignment a = assign_cluster(data, static_cast<int>(i), params, gamma, config, fix_shifts);
    result.z[i] = a.label;
    result.criterion[i] = a.criterion;
    for (int m = 0; m < data.M; ++m) {
      result.v[i * static_cast<std::size_t>(data.M) + m] = a.v[static_cast<std::size_t>(m)];
    }
  });
  return result;
}

}  // namespace asimm
