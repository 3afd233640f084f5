#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace asimm {

struct KMeansResult {
  std::vector<int> labels;      // size n, values 0..K-1, all clusters nonempty
  std::vector<double> centers;  // K x d row-major
  double within_ss = 0.0;
};

/// Deterministic Lloyd iterations on n points of dimension d (row-major).
/// Each restart seeds greedily: a random first center from the stream
/// keyed by (seed, restart), then farthest-point picks. Clusters emptied
/// during iteration are re-seeded from the point farthest from its center.
/// warm_centers, when given, is tried as one additional restart (used to
/// make SS curves nested across K).
KMeansResult lloyd_kmeans(const std::vector<double>& points, int n, int d, int K,
                          std::uint64_t seed, int restarts = 25,
                          const std::optional<std::vector<double>>& warm_centers = std::nullopt);

}  // namespace asimm
