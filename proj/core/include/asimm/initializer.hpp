#pragma once

#include <cstdint>
#include <vector>

#include "asimm/event_data.hpp"

namespace asimm {

struct InitShifts {
  std::vector<double> v;               // n x M, index i*M + m
  std::vector<std::uint8_t> missing;   // 1 when no post-stimulus event existed
};

/// Initial shifts from the earliest event following each stimulus:
/// v0_{i,m} = min over (r, j) of { t_{i,r,j} - w*_{r,m} : t > w*_{r,m} }.
/// Subjects with no event after stimulus m in any observation get 0 and
/// are flagged.
InitShifts init_shifts(const Dataset& dataset);

/// Per-subject pooled adjusted event times: events in the segment of
/// stimulus m (closed on the left at u0_{i,r,m} = v0_{i,m} + w*_{r,m}) are
/// moved to that stimulus's anchor min_r' w*_{r',m}. Events before the
/// first segment stay unshifted; outputs are clipped to [0, T].
std::vector<std::vector<double>> adjusted_events(const Dataset& dataset,
                                                 const std::vector<double>& v0);

/// Initial memberships from Lloyd k-means on per-subject normalized
/// histograms of adjusted times (bins uniform over [0, T]). Labels are
/// 0-based with all clusters nonempty. Throws when K exceeds the subject
/// count.
std::vector<int> init_memberships(const Dataset& dataset, const std::vector<double>& v0, int K,
                                  int bins, std::uint64_t seed);

}  // namespace asimm
