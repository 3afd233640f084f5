#include <doctest.h>

#include <cmath>

#include "asimm/rng.hpp"
#include "asimm/simgen.hpp"
#include "support.hpp"

using asimm::q1;
using asimm::q2;

TEST_CASE("template densities integrate to one") {
  double i1 = test_support::simpson(q1, 0.0, 2.5, 1 << 18);
  double i2 = test_support::simpson(q2, 0.0, 2.5, 1 << 18);
  CHECK(i1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(i2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("template maxima are 4") {
  CHECK(q1(0.65) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(q2(0.125) == doctest::Approx(4.0).epsilon(1e-12));
  double max1 = 0.0, max2 = 0.0;
  for (int g = 0; g <= 100000; ++g) {
    double t = g * 2.5 / 100000;
    max1 = std::max(max1, q1(t));
    max2 = std::max(max2, q2(t));
  }
  CHECK(max1 <= 4.0 + 1e-12);
  CHECK(max2 <= 4.0 + 1e-12);
}

TEST_CASE("scenario1 expected count is 190") {
  auto [dataset, truth] = asimm::scenario1(2, 1, 0.3, 5);
  CHECK(truth.lambda[0] == doctest::Approx(190.0).epsilon(1e-12));
  CHECK(truth.K == 1);
  CHECK(truth.M == 2);
  CHECK(dataset.horizon == 2.5);
}

TEST_CASE("scenario2 component table at rho = 0.5 and rho = 1") {
  auto [d_half, t_half] = asimm::scenario2(8, 1, 0.3, 0.5, 6);
  // 2 rho - 1 = 0: h1 = 0, h2 = 1.
  for (double t : {0.45, 0.6, 0.85, 0.95, 1.0}) {
    CHECK(t_half.component(1, 0).evaluate(t) ==
          doctest::Approx(60.0 * q1(t) + 48.0 * q2(2.0 * (t - 0.8))).epsilon(1e-12));
    CHECK(t_half.component(1, 1).evaluate(t) ==
          doctest::Approx(60.0 * q2(t) - 48.0 * q2(2.0 * t)).epsilon(1e-12));
  }

  auto [d_one, t_one] = asimm::scenario2(8, 1, 0.3, 1.0, 6);
  for (double t : {0.45, 0.6, 0.85}) {
    CHECK(t_one.component(3, 0).evaluate(t) == doctest::Approx(150.0 * q1(t)).epsilon(1e-12));
    CHECK(t_one.component(3, 1).evaluate(t) == 0.0);
  }
}

TEST_CASE("scenario2 component masses match the closed forms") {
  for (double rho : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    auto [dataset, truth] = asimm::scenario2(8, 1, 0.2, rho, 7);
    // k = 3 row: 67.5 (1 +- 0.5 rho), checked against quadrature.
    double m0 = test_support::simpson([&](double t) { return truth.component(2, 0).evaluate(t); },
                                      0.0, 2.5, 1 << 17);
    double m1 = test_support::simpson([&](double t) { return truth.component(2, 1).evaluate(t); },
                                      0.0, 2.5, 1 << 17);
    CHECK(m0 == doctest::Approx(67.5 * (1.0 + 0.5 * rho)).epsilon(1e-8));
    CHECK(m1 == doctest::Approx(67.5 * (1.0 - 0.5 * rho)).epsilon(1e-8));
    CHECK(truth.component(2, 0).mass() == doctest::Approx(m0).epsilon(1e-8));
    CHECK(truth.component(2, 1).mass() == doctest::Approx(m1).epsilon(1e-8));

    // Memberships are sequential equal blocks.
    CHECK(truth.z.front() == 0);
    CHECK(truth.z.back() == 3);
  }
}

TEST_CASE("sample_poisson homogeneous mean and empty edge") {
  asimm::CounterRng rng({8});
  asimm::EventTimes empty = asimm::sample_poisson([](double) { return 0.0; }, 2.5, 0.0, rng);
  CHECK(empty.times.empty());

  double total = 0.0;
  const int draws = 2000;
  for (int d = 0; d < draws; ++d) {
    asimm::CounterRng stream({9, static_cast<std::uint64_t>(d)});
    auto ev = asimm::sample_poisson([](double) { return 20.0; }, 2.5, 20.0, stream);
    total += static_cast<double>(ev.count());
  }
  double mean = total / draws;
  double se = std::sqrt(50.0 / draws);
  CHECK(std::abs(mean - 50.0) < 4.0 * se);
}

TEST_CASE("sample_poisson respects shifted supports") {
  const double u = 0.37;
  auto intensity = [&](double t) { return 70.0 * q1(t - u); };
  for (std::uint64_t d = 0; d < 50; ++d) {
    asimm::CounterRng stream({10, d});
    auto ev = asimm::sample_poisson(intensity, 2.5, 280.0, stream);
    for (double t : ev.times) {
      CHECK(t >= 0.4 + u);
      CHECK(t <= 0.9 + u);
    }
  }
}

TEST_CASE("sample_poisson rejects an insufficient bound") {
  asimm::CounterRng rng({11});
  CHECK_THROWS(asimm::sample_poisson([](double) { return 20.0; }, 2.5, 10.0, rng));
}

TEST_CASE("generated counts track the intensity integral") {
  // Single (i, r) cell of scenario 1 over replicates: mean count ~ Lambda.
  double total = 0.0;
  const int reps = 1000;
  for (int rep = 0; rep < reps; ++rep) {
    auto [dataset, truth] = asimm::scenario1(1, 1, 0.3, 12, static_cast<std::uint64_t>(rep));
    total += static_cast<double>(dataset.at(0, 0).count());
  }
  double mean = total / reps;
  double se = std::sqrt(190.0 / reps);
  CHECK(std::abs(mean - 190.0) < 4.0 * se);
}

TEST_CASE("scenario generation is reproducible bitwise") {
  auto [d1, t1] = asimm::scenario2(6, 2, 0.2, 0.7, 99, 3);
  auto [d2, t2] = asimm::scenario2(6, 2, 0.2, 0.7, 99, 3);
  CHECK(d1.shifts == d2.shifts);
  CHECK(t1.v == t2.v);
  for (std::size_t c = 0; c < d1.events.size(); ++c) {
    CHECK(d1.events[c].times == d2.events[c].times);
  }
  auto [d3, t3] = asimm::scenario2(6, 2, 0.2, 0.7, 99, 4);
  bool any_diff = d3.shifts != d1.shifts;
  for (std::size_t c = 0; c < d1.events.size() && !any_diff; ++c) {
    any_diff = d1.events[c].times != d3.events[c].times;
  }
  CHECK(any_diff);
}

TEST_CASE("intensity evaluation: baseline before supports, peak value, nonnegative") {
  auto [dataset, truth] = asimm::scenario1(4, 2, 0.1, 13);
  // Before any shifted support the intensity is the baseline.
  CHECK(truth.intensity(0, 0, 0.05) == doctest::Approx(20.0).epsilon(1e-12));

  // At the q1 peak (0.65 + total shift) with q2's support far away:
  double u1 = truth.v[0] + truth.w[0];
  CHECK(truth.intensity(0, 0, 0.65 + u1) == doctest::Approx(300.0).epsilon(1e-12));

  for (double rho : {0.0, 0.5, 1.0}) {
    auto [d2, t2] = asimm::scenario2(8, 2, 0.3, rho, 14);
    for (int g = 0; g < 4096; ++g) {
      double t = g * 2.5 / 4096;
      CHECK(t2.intensity(5, 0, t) >= 0.0);
    }
  }
}
