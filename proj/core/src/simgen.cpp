#include "asimm/simgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "asimm/rng.hpp"

namespace asimm {

namespace {

constexpr double kTemplateMax = 4.0;  // both q1 and q2 peak at 4

// Stream tags so the draws for shifts and events never collide.
constexpr std::uint64_t kTagSubjectShift = 0x76ULL;
constexpr std::uint64_t kTagObsShift = 0x77ULL;
constexpr std::uint64_t kTagEvents = 0x65ULL;

}  // namespace

double q1(double t) {
  if (t < 0.4 || t > 0.9) return 0.0;
  return 2.0 - 2.0 * std::cos(4.0 * std::numbers::pi * (t - 0.4));
}

double q2(double t) {
  if (t < 0.0 || t > 0.5) return 0.0;
  return 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * std::sqrt(2.0 * t));
}

double IntensityComponent::evaluate(double t) const {
  double acc = 0.0;
  for (const ComponentTerm& term : terms) {
    double arg = term.scale * (t - term.offset);
    acc += term.coef * (term.base == 1 ? q1(arg) : q2(arg));
  }
  return acc;
}

double IntensityComponent::upper_bound() const {
  double acc = 0.0;
  for (const ComponentTerm& term : terms) {
    acc += std::max(term.coef, 0.0) * kTemplateMax;
  }
  return acc;
}

double IntensityComponent::mass() const {
  // Templates integrate to one, so each term contributes coef / scale.
  double acc = 0.0;
  for (const ComponentTerm& term : terms) acc += term.coef / term.scale;
  return acc;
}

double GroundTruth::intensity(int i, int r, double t) const {
  int k = z[static_cast<std::size_t>(i)];
  double acc = baseline[static_cast<std::size_t>(k)];
  for (int m = 0; m < M; ++m) {
    double shift = v[static_cast<std::size_t>(i) * M + m] + w[static_cast<std::size_t>(r) * M + m];
    acc += component(k, m).evaluate(t - shift);
  }
  return acc;
}

EventTimes sample_poisson(const std::function<double(double)>& intensity, double horizon,
                          double rate_bound, CounterRng& rng) {
  if (rate_bound < 0.0) throw std::invalid_argument("sample_poisson: negative rate bound");
  EventTimes out;
  out.horizon = horizon;
  if (rate_bound == 0.0) return out;
  double t = 0.0;
  while (true) {
    t += rng.exponential(rate_bound);
    if (t >= horizon) break;
    double rate = intensity(t);
    if (rate > rate_bound) {
      throw std::runtime_error("sample_poisson: intensity exceeds the thinning bound");
    }
    if (rng.next_double() * rate_bound < rate) out.times.push_back(t);
  }
  return out;
}

namespace {

std::pair<Dataset, GroundTruth> generate(GroundTruth truth, int n, int R, double tau,
                                         std::uint64_t seed, std::uint64_t replicate) {
  const int M = truth.M;
  truth.tau = tau;

  // Subject-specific latencies: v_1 ~ U(0, 1/64), v_2 ~ U(0, 1/16).
  truth.v.assign(static_cast<std::size_t>(n) * M, 0.0);
  for (int i = 0; i < n; ++i) {
    CounterRng rng({seed, replicate, kTagSubjectShift, static_cast<std::uint64_t>(i)});
    truth.v[static_cast<std::size_t>(i) * M + 0] = rng.uniform(0.0, 1.0 / 64.0);
    if (M > 1) truth.v[static_cast<std::size_t>(i) * M + 1] = rng.uniform(0.0, 1.0 / 16.0);
  }

  // Observation-specific onsets: w_1 ~ U(0, tau), w_2 ~ U(0.8, 0.8 + tau).
  truth.w.assign(static_cast<std::size_t>(R) * M, 0.0);
  for (int r = 0; r < R; ++r) {
    CounterRng rng({seed, replicate, kTagObsShift, static_cast<std::uint64_t>(r)});
    truth.w[static_cast<std::size_t>(r) * M + 0] = rng.uniform(0.0, tau);
    if (M > 1) truth.w[static_cast<std::size_t>(r) * M + 1] = rng.uniform(0.8, 0.8 + tau);
  }

  Dataset dataset;
  dataset.n = n;
  dataset.R = R;
  dataset.M = M;
  dataset.horizon = truth.horizon;
  dataset.shifts = truth.w;
  dataset.events.resize(static_cast<std::size_t>(n) * R);

  for (int i = 0; i < n; ++i) {
    int k = truth.z[static_cast<std::size_t>(i)];
    double bound = truth.baseline[static_cast<std::size_t>(k)];
    for (int m = 0; m < M; ++m) bound += truth.component(k, m).upper_bound();
    for (int r = 0; r < R; ++r) {
      CounterRng rng({seed, replicate, kTagEvents, static_cast<std::uint64_t>(i),
                      static_cast<std::uint64_t>(r)});
      dataset.at(i, r) = sample_poisson(
          [&](double t) { return truth.intensity(i, r, t); }, truth.horizon, bound, rng);
    }
  }
  return {std::move(dataset), std::move(truth)};
}

}  // namespace

std::pair<Dataset, GroundTruth> scenario1(int n, int R, double tau, std::uint64_t seed,
                                          std::uint64_t replicate) {
  if (n < 1 || R < 1) throw std::invalid_argument("scenario1: n and R must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("scenario1: tau must be in (0, 1)");
  GroundTruth truth;
  truth.scenario = 1;
  truth.K = 1;
  truth.M = 2;
  truth.horizon = 2.5;
  truth.rho = 0.0;
  truth.z.assign(static_cast<std::size_t>(n), 0);
  truth.baseline = {20.0};
  truth.components = {
      IntensityComponent{{{1, 70.0, 1.0, 0.0}}},
      IntensityComponent{{{2, 70.0, 1.0, 0.0}}},
  };
  truth.lambda = {truth.baseline[0] * truth.horizon + truth.components[0].mass() +
                  truth.components[1].mass()};
  return generate(std::move(truth), n, R, tau, seed, replicate);
}

std::pair<Dataset, GroundTruth> scenario2(int n, int R, double tau, double rho,
                                          std::uint64_t seed, std::uint64_t replicate) {
  if (n < 1 || R < 1) throw std::invalid_argument("scenario2: n and R must be >= 1");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("scenario2: tau must be in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("scenario2: rho must be in [0, 1]");

  const int K = 4;
  double x = 2.0 * rho - 1.0;
  double h1 = std::sqrt(std::max(x, 0.0));
  double h2 = 1.0 + std::min(x, 0.0);

  GroundTruth truth;
  truth.scenario = 2;
  truth.K = K;
  truth.M = 2;
  truth.horizon = 2.5;
  truth.rho = rho;
  truth.baseline.assign(static_cast<std::size_t>(K), 20.0);
  truth.components = {
      // k = 1
      IntensityComponent{{{1, 52.5, 1.0, 0.0}}},
      IntensityComponent{{{2, 52.5, 1.0, 0.0}}},
      // k = 2
      IntensityComponent{{{1, 60.0 * (1.0 - h1), 1.0, 0.0}, {2, 48.0 * h2, 2.0, 0.8}}},
      IntensityComponent{{{2, 60.0 * (1.0 + h1), 1.0, 0.0}, {2, -48.0 * h2, 2.0, 0.0}}},
      // k = 3
      IntensityComponent{{{1, 67.5 * (1.0 + 0.5 * rho), 1.0, 0.0}}},
      IntensityComponent{{{2, 67.5 * (1.0 - 0.5 * rho), 1.0, 0.0}}},
      // k = 4
      IntensityComponent{{{1, 75.0 * (1.0 + rho), 1.0, 0.0}}},
      IntensityComponent{{{2, 75.0 * (1.0 - rho), 1.0, 0.0}}},
  };
  truth.lambda.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    truth.lambda[static_cast<std::size_t>(k)] =
        truth.baseline[static_cast<std::size_t>(k)] * truth.horizon +
        truth.component(k, 0).mass() + truth.component(k, 1).mass();
  }

  // Sequential equal-size memberships: z_i = ceil((i/n) K) with 1-based i.
  truth.z.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int label = static_cast<int>(std::ceil(static_cast<double>(i + 1) * K / n)) - 1;
    truth.z[static_cast<std::size_t>(i)] = std::clamp(label, 0, K - 1);
  }
  return generate(std::move(truth), n, R, tau, seed, replicate);
}

}  // namespace asimm
