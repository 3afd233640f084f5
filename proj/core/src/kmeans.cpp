#include "asimm/kmeans.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "asimm/rng.hpp"

namespace asimm {

namespace {

double sq_dist(const double* a, const double* b, int d) {
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

struct Run {
  std::vector<int> labels;
  std::vector<double> centers;
  double within_ss = 0.0;
};

Run run_lloyd(const std::vector<double>& pts, int n, int d, int K, std::vector<double> centers) {
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<double> sums(static_cast<std::size_t>(K) * d);
  std::vector<int> sizes(static_cast<std::size_t>(K));
  double ss = 0.0;

  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double* p = pts.data() + static_cast<std::size_t>(i) * d;
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int k = 0; k < K; ++k) {
        double dist = sq_dist(p, centers.data() + static_cast<std::size_t>(k) * d, d);
        if (dist < best) {
          best = dist;
          arg = k;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != arg) changed = true;
      labels[static_cast<std::size_t>(i)] = arg;
      ss += best;
    }
    if (!changed) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (int i = 0; i < n; ++i) {
      int k = labels[static_cast<std::size_t>(i)];
      ++sizes[static_cast<std::size_t>(k)];
      const double* p = pts.data() + static_cast<std::size_t>(i) * d;
      for (int j = 0; j < d; ++j) sums[static_cast<std::size_t>(k) * d + j] += p[j];
    }
    for (int k = 0; k < K; ++k) {
      if (sizes[static_cast<std::size_t>(k)] == 0) {
        // Re-seed the empty cluster from the point farthest from its center.
        double worst = -1.0;
        int pick = 0;
        for (int i = 0; i < n; ++i) {
          int owner = labels[static_cast<std::size_t>(i)];
          double dist = sq_dist(pts.data() + static_cast<std::size_t>(i) * d,
                                centers.data() + static_cast<std::size_t>(owner) * d, d);
          if (dist > worst) {
            worst = dist;
            pick = i;
          }
        }
        for (int j = 0; j < d; ++j) {
          centers[static_cast<std::size_t>(k) * d + j] = pts[static_cast<std::size_t>(pick) * d + j];
        }
      } else {
        for (int j = 0; j < d; ++j) {
          centers[static_cast<std::size_t>(k) * d + j] =
              sums[static_cast<std::size_t>(k) * d + j] / sizes[static_cast<std::size_t>(k)];
        }
      }
    }
  }

  // Guarantee nonempty clusters in the returned labeling: hand distinct
  // points to any cluster that ended empty (identical-input degeneracy).
  std::fill(sizes.begin(), sizes.end(), 0);
  for (int label : labels) ++sizes[static_cast<std::size_t>(label)];
  for (int k = 0; k < K; ++k) {
    if (sizes[static_cast<std::size_t>(k)] > 0) continue;
    for (int i = 0; i < n; ++i) {
      int owner = labels[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(owner)] > 1) {
        --sizes[static_cast<std::size_t>(owner)];
        labels[static_cast<std::size_t>(i)] = k;
        sizes[static_cast<std::size_t>(k)] = 1;
        break;
      }
    }
  }

  ss = 0.0;
  for (int i = 0; i < n; ++i) {
    ss += sq_dist(pts.data() + static_cast<std::size_t>(i) * d,
                  centers.data() + static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]) * d, d);
  }
  return Run{std::move(labels), std::move(centers), ss};
}

std::vector<double> farthest_point_seed(const std::vector<double>& pts, int n, int d, int K,
                                        int first) {
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(K) * d);
  std::vector<double> min_dist(static_cast<std::size_t>(n),
                               std::numeric_limits<double>::infinity());
  int pick = first;
  for (int k = 0; k < K; ++k) {
    const double* p = pts.data() + static_cast<std::size_t>(pick) * d;
    centers.insert(centers.end(), p, p + d);
    if (k + 1 == K) break;
    double best = -1.0;
    int next = 0;
    for (int i = 0; i < n; ++i) {
      double dist = sq_dist(pts.data() + static_cast<std::size_t>(i) * d, p, d);
      if (dist < min_dist[static_cast<std::size_t>(i)]) min_dist[static_cast<std::size_t>(i)] = dist;
      if (min_dist[static_cast<std::size_t>(i)] > best) {
        best = min_dist[static_cast<std::size_t>(i)];
        next = i;
      }
    }
    pick = next;
  }
  return centers;
}

}  // namespace

KMeansResult lloyd_kmeans(const std::vector<double>& points, int n, int d, int K,
                          std::uint64_t seed, int restarts,
                          const std::optional<std::vector<double>>& warm_centers) {
  if (n < 1 || d < 1 || K < 1) throw std::invalid_argument("lloyd_kmeans: bad dimensions");
  if (K > n) throw std::invalid_argument("lloyd_kmeans: more clusters than points");
  if (points.size() != static_cast<std::size_t>(n) * d) {
    throw std::invalid_argument("lloyd_kmeans: points size mismatch");
  }

  Run best;
  bool have_best = false;
  auto consider = [&](Run run) {
    if (!have_best || run.within_ss < best.within_ss) {
      best = std::move(run);
      have_best = true;
    }
  };

  for (int restart = 0; restart < restarts; ++restart) {
    CounterRng rng({seed, static_cast<std::uint64_t>(restart), 0x6b6d65616e73ULL});
    int first = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    consider(run_lloyd(points, n, d, K, farthest_point_seed(points, n, d, K, first)));
  }
  if (warm_centers && warm_centers->size() == static_cast<std::size_t>(K) * d) {
    consider(run_lloyd(points, n, d, K, *warm_centers));
  }
  return KMeansResult{std::move(best.labels), std::move(best.centers), best.within_ss};
}

}  // namespace asimm
