#include "asimm/initializer.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "asimm/kmeans.hpp"

namespace asimm {

InitShifts init_shifts(const Dataset& dataset) {
  InitShifts out;
  out.v.assign(static_cast<std::size_t>(dataset.n) * dataset.M, 0.0);
  out.missing.assign(static_cast<std::size_t>(dataset.n) * dataset.M, 0);
  for (int i = 0; i < dataset.n; ++i) {
    for (int m = 0; m < dataset.M; ++m) {
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < dataset.R; ++r) {
        double w = dataset.shift(r, m);
        for (double t : dataset.at(i, r).times) {
          if (t > w && t - w < best) best = t - w;
        }
      }
      std::size_t idx = static_cast<std::size_t>(i) * dataset.M + m;
      if (std::isinf(best)) {
        out.missing[idx] = 1;
      } else {
        out.v[idx] = best;
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> adjusted_events(const Dataset& dataset,
                                                 const std::vector<double>& v0) {
  if (v0.size() != static_cast<std::size_t>(dataset.n) * dataset.M) {
    throw std::invalid_argument("adjusted_events: v0 size mismatch");
  }
  const int M = dataset.M;
  // Anchor of stimulus m: its earliest onset across observations.
  std::vector<double> anchor(static_cast<std::size_t>(M),
                             std::numeric_limits<double>::infinity());
  for (int r = 0; r < dataset.R; ++r) {
    for (int m = 0; m < M; ++m) {
      anchor[static_cast<std::size_t>(m)] = std::min(anchor[static_cast<std::size_t>(m)], dataset.shift(r, m));
    }
  }

  std::vector<std::vector<double>> pooled(static_cast<std::size_t>(dataset.n));
  std::vector<double> u(static_cast<std::size_t>(M));
  for (int i = 0; i < dataset.n; ++i) {
    for (int r = 0; r < dataset.R; ++r) {
      for (int m = 0; m < M; ++m) {
        u[static_cast<std::size_t>(m)] =
            v0[static_cast<std::size_t>(i) * M + m] + dataset.shift(r, m);
      }
      for (double t : dataset.at(i, r).times) {
        // Segment of t: the last stimulus whose total shift is <= t
        // (closed-left); events before every segment stay unshifted.
        int seg = -1;
        for (int m = 0; m < M; ++m) {
          if (u[static_cast<std::size_t>(m)] <= t) seg = m;
        }
        double adj = t;
        if (seg >= 0) {
          adj = t - u[static_cast<std::size_t>(seg)] + anchor[static_cast<std::size_t>(seg)];
        }
        adj = std::clamp(adj, 0.0, dataset.horizon);
        pooled[static_cast<std::size_t>(i)].push_back(adj);
      }
    }
  }
  return pooled;
}

std::vector<int> init_memberships(const Dataset& dataset, const std::vector<double>& v0, int K,
                                  int bins, std::uint64_t seed) {
  if (K > dataset.n) throw std::invalid_argument("init_memberships: K exceeds subject count");
  if (K < 1 || bins < 1) throw std::invalid_argument("init_memberships: bad K or bins");

  std::vector<std::vector<double>> pooled = adjusted_events(dataset, v0);
  std::vector<double> features(static_cast<std::size_t>(dataset.n) * bins, 0.0);
  const double T = dataset.horizon;
  for (int i = 0; i < dataset.n; ++i) {
    const auto& times = pooled[static_cast<std::size_t>(i)];
    if (times.empty()) continue;
    for (double t : times) {
      int b = std::min(bins - 1, static_cast<int>(t / T * bins));
      features[static_cast<std::size_t>(i) * bins + b] += 1.0;
    }
    for (int b = 0; b < bins; ++b) {
      features[static_cast<std::size_t>(i) * bins + b] /= static_cast<double>(times.size());
    }
  }
  return lloyd_kmeans(features, dataset.n, bins, K, seed, 25).labels;
}

}  // namespace asimm
