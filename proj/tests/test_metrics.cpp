#include <doctest.h>

#include <cmath>
#include <vector>

#include "asimm/metrics.hpp"
#include "asimm/rng.hpp"
#include "asimm/spectral.hpp"
#include "support.hpp"

using asimm::Complex;
using asimm::SpectralCurve;

namespace {

SpectralCurve random_curve(asimm::CounterRng& rng, int ell0, double horizon, double scale = 1.0) {
  return SpectralCurve(test_support::random_symmetric(rng, ell0, scale), horizon);
}

/// Exhaustive fine-grid search oracle with step T/8192 over [-T, T],
/// followed by a local bisection polish so the comparison is not limited
/// by the scan step itself.
double brute_force_distance(const SpectralCurve& est, const SpectralCurve& tgt) {
  const double T = est.horizon();
  const int G = 8192;
  std::vector<double> es = synthesize(est, G);
  std::vector<double> ts = synthesize(tgt, G);
  auto target_eval = [&](double t) { return tgt.evaluate(t); };
  double best = std::numeric_limits<double>::infinity();
  int best_c = 0;
  for (int c = -G; c <= G; ++c) {
    double acc = 0.0;
    for (int g = 0; g < G; ++g) {
      int src = ((g - c) % G + G) % G;
      double diff = es[static_cast<std::size_t>(src)] - ts[static_cast<std::size_t>(g)];
      acc += diff * diff;
    }
    acc *= T / G;
    if (acc < best) {
      best = acc;
      best_c = c;
    }
  }
  // Ternary-search polish inside the winning cell.
  double lo = (best_c - 1) * T / G;
  double hi = (best_c + 1) * T / G;
  for (int it = 0; it < 80; ++it) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (asimm::shift_error(est, target_eval, m1) < asimm::shift_error(est, target_eval, m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min(best, asimm::shift_error(est, target_eval, (lo + hi) / 2.0));
}

/// Brute-force ARI via direct pair counting, independent of the
/// contingency-table formula.
double pair_counting_ari(const std::vector<int>& a, const std::vector<int>& b) {
  long long n11 = 0, n00 = 0, n10 = 0, n01 = 0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool same_a = a[i] == a[j];
      bool same_b = b[i] == b[j];
      if (same_a && same_b) ++n11;
      else if (same_a) ++n10;
      else if (same_b) ++n01;
      else ++n00;
    }
  }
  long double num = 2.0L * (static_cast<long double>(n11) * n00 -
                            static_cast<long double>(n10) * n01);
  long double den = static_cast<long double>(n11 + n10) * (n10 + n00) +
                    static_cast<long double>(n11 + n01) * (n01 + n00);
  if (den == 0.0L) return 1.0;
  return static_cast<double>(num / den);
}

}  // namespace

TEST_CASE("aligned distance of a curve with itself is zero") {
  asimm::CounterRng rng({71});
  SpectralCurve f = random_curve(rng, 8, 2.5);
  auto result = asimm::shift_aligned_distance(f, [&](double t) { return f.evaluate(t); });
  CHECK(result.distance <= 1e-10);
}

TEST_CASE("aligned distance recovers a constructed shift") {
  asimm::CounterRng rng({72});
  const double T = 2.5;
  SpectralCurve truth = random_curve(rng, 8, T);
  SpectralCurve shifted = shift_phase(truth, 0.3);  // estimate = S^{0.3} truth
  auto result =
      asimm::shift_aligned_distance(shifted, [&](double t) { return truth.evaluate(t); });
  CHECK(result.distance <= 1e-6);
  CHECK(std::abs(result.shift - (-0.3)) <= T / 512.0);
}

TEST_CASE("aligned distance matches the exhaustive fine-grid oracle") {
  asimm::CounterRng rng({73});
  const double T = 2.0;
  for (int pair = 0; pair < 20; ++pair) {
    SpectralCurve a = random_curve(rng, 6, T, 0.5);
    SpectralCurve b = random_curve(rng, 6, T, 0.5);
    double mine = asimm::shift_aligned_distance(a, [&](double t) { return b.evaluate(t); }).distance;
    double oracle = brute_force_distance(a, b);
    CHECK(mine <= oracle + 1e-6);
    CHECK(std::abs(mine - oracle) < 1e-6 * std::max(1.0, oracle));
  }
}

TEST_CASE("aligned distance is small for any in-range true shift") {
  asimm::CounterRng rng({74});
  const double T = 2.0;
  SpectralCurve f = random_curve(rng, 6, T, 0.4);
  for (double v : {-0.9, -0.31, 0.0, 0.18, 0.77}) {
    SpectralCurve moved = shift_phase(f, v);
    auto result = asimm::shift_aligned_distance(moved, [&](double t) { return f.evaluate(t); });
    CHECK(result.distance <= 1e-6);
  }
}

TEST_CASE("grid-sample variant handles identical inputs exactly") {
  asimm::CounterRng rng({75});
  const double T = 2.5;
  SpectralCurve f = random_curve(rng, 8, T);
  std::vector<double> samples = synthesize(f, 2048);
  auto result =
      asimm::shift_aligned_distance(samples, T, [&](double t) { return f.evaluate(t); });
  CHECK(result.distance <= 1e-10);
}

TEST_CASE("unaligned error of an additive offset matches quadrature") {
  const double T = 2.5;
  // Estimate = truth + c on a support of length s: squared error c^2 s at v = 0.
  const double c = 0.8;
  SpectralCurve est = SpectralCurve::zero(4, T);
  est.set_coeff(0, Complex(c, 0.0));  // constant c over the whole horizon
  auto zero_truth = [](double) { return 0.0; };
  double err0 = asimm::shift_error(est, zero_truth, 0.0);
  CHECK(err0 == doctest::Approx(c * c * T).epsilon(1e-10));
  double quad = test_support::rectangle([&](double t) { double d = est.evaluate(t); return d * d; },
                                        T, 2048);
  CHECK(err0 == doctest::Approx(quad).epsilon(1e-12));
}

TEST_CASE("mise: perfect estimates give zero and shifting all estimates is invariant") {
  asimm::CounterRng rng({76});
  const double T = 2.5;
  const double lambda = 190.0;
  std::vector<SpectralCurve> est;
  std::vector<std::function<double(double)>> truth;
  std::vector<SpectralCurve> targets;
  for (int m = 0; m < 2; ++m) {
    SpectralCurve target = random_curve(rng, 6, T, 0.3);
    targets.push_back(target);
    est.push_back(target);  // f' = f / Lambda handled below
    truth.push_back([target, lambda](double t) { return target.evaluate(t) * lambda; });
  }
  CHECK(asimm::mise(est, truth, lambda) <= 1e-9);

  std::vector<SpectralCurve> moved;
  for (const auto& curve : est) moved.push_back(shift_phase(curve, 0.42));
  double shifted_mise = asimm::mise(moved, truth, lambda);
  CHECK(shifted_mise <= 1e-6);
  CHECK(asimm::mise(est, truth, lambda) >= 0.0);
}

TEST_CASE("ari worked examples") {
  std::vector<int> a = {0, 0, 1, 1};
  std::vector<int> b = {1, 1, 0, 0};
  CHECK(asimm::ari(a, b) == doctest::Approx(1.0));

  // Contingency pairs: index 4, row pairs 6, column pairs 7, total pairs 15:
  // ARI = (4 - 2.8) / (6.5 - 2.8) = 1.2 / 3.7.
  std::vector<int> x = {0, 0, 0, 1, 1, 1};
  std::vector<int> y = {0, 0, 1, 1, 1, 1};
  CHECK(asimm::ari(x, y) == doctest::Approx(1.2 / 3.7).epsilon(1e-12));
  CHECK(asimm::ari(y, x) == doctest::Approx(1.2 / 3.7).epsilon(1e-12));
}

TEST_CASE("ari equals the brute-force pair-counting oracle") {
  asimm::CounterRng rng({77});
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 11);
    int ka = 1 + static_cast<int>(rng.next_u64() % 4);
    int kb = 1 + static_cast<int>(rng.next_u64() % 4);
    std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (auto& v : a) v = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(ka));
    for (auto& v : b) v = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(kb));
    CHECK(asimm::ari(a, b) == doctest::Approx(pair_counting_ari(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("ari symmetry, self identity, and label permutation invariance") {
  std::vector<int> a = {0, 1, 2, 0, 1, 2, 2};
  CHECK(asimm::ari(a, a) == doctest::Approx(1.0));
  std::vector<int> permuted = a;
  for (auto& v : permuted) v = (v + 1) % 3;
  CHECK(asimm::ari(a, permuted) == doctest::Approx(1.0));
  std::vector<int> b = {0, 0, 1, 1, 2, 2, 2};
  CHECK(asimm::ari(a, b) == doctest::Approx(asimm::ari(b, a)).epsilon(1e-15));
  CHECK_THROWS(asimm::ari(a, std::vector<int>{0, 1}));
}

TEST_CASE("ari of random labels against fixed labels is centered at zero") {
  asimm::CounterRng rng({78});
  std::vector<int> fixed = {0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3};
  double total = 0.0;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    std::vector<int> random_labels(fixed.size());
    for (auto& v : random_labels) v = static_cast<int>(rng.next_u64() % 4);
    total += asimm::ari(fixed, random_labels);
  }
  CHECK(std::abs(total / draws) < 0.02);
}

TEST_CASE("best_label_permutation aligns a relabeled partition") {
  std::vector<int> truth = {0, 0, 1, 1, 2, 2};
  std::vector<int> est = {2, 2, 0, 0, 1, 1};
  auto sigma = asimm::best_label_permutation(truth, est, 3);
  // Estimated label k corresponds to true label sigma[k].
  CHECK(sigma[2] == 0);
  CHECK(sigma[0] == 1);
  CHECK(sigma[1] == 2);
}
