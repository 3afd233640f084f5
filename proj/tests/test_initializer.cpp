#include <doctest.h>

#include <algorithm>

#include "asimm/initializer.hpp"
#include "asimm/metrics.hpp"

using asimm::Dataset;
using asimm::EventTimes;

namespace {

Dataset worked_example() {
  // Two trials of one subject, single stimulus:
  // trial 1 events {0.5, 1.2} with w* = 0.4; trial 2 events {0.9} with w* = 0.3.
  Dataset d;
  d.n = 1;
  d.R = 2;
  d.M = 1;
  d.horizon = 2.0;
  d.shifts = {0.4, 0.3};
  d.events = {EventTimes{{0.5, 1.2}, 2.0}, EventTimes{{0.9}, 2.0}};
  return d;
}

}  // namespace

TEST_CASE("init_shifts picks the earliest post-stimulus gap") {
  // Candidate gaps are {0.1, 0.8, 0.6}; the minimum is 0.1.
  auto init = asimm::init_shifts(worked_example());
  CHECK(init.v[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(init.missing[0] == 0);
}

TEST_CASE("init_shifts flags subjects with no post-stimulus events") {
  Dataset d = worked_example();
  d.shifts = {1.5, 1.5};
  auto init = asimm::init_shifts(d);
  CHECK(init.v[0] == 0.0);
  CHECK(init.missing[0] == 1);
}

TEST_CASE("init_shifts excludes events exactly at the stimulus onset") {
  Dataset d;
  d.n = 1;
  d.R = 1;
  d.M = 1;
  d.horizon = 2.0;
  d.shifts = {0.5};
  d.events = {EventTimes{{0.5, 0.8}, 2.0}};
  auto init = asimm::init_shifts(d);
  CHECK(init.v[0] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("adjusted_events applies the anchor formula") {
  // Single stimulus with u0 = 1.0 and anchor 0.4: an event at 1.3 maps to 0.7.
  Dataset d;
  d.n = 1;
  d.R = 2;
  d.M = 1;
  d.horizon = 2.0;
  d.shifts = {0.9, 0.4};
  d.events = {EventTimes{{1.3}, 2.0}, EventTimes{{}, 2.0}};
  std::vector<double> v0 = {0.1};  // u0 for trial 1 = 0.1 + 0.9 = 1.0
  auto pooled = asimm::adjusted_events(d, v0);
  REQUIRE(pooled[0].size() == 1);
  CHECK(pooled[0][0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("adjusted_events boundary event belongs to its segment (closed left)") {
  Dataset d;
  d.n = 1;
  d.R = 1;
  d.M = 2;
  d.horizon = 3.0;
  d.shifts = {0.5, 1.5};
  d.events = {EventTimes{{1.5, 0.2}, 3.0}};
  std::vector<double> v0 = {0.0, 0.0};
  // u0 = {0.5, 1.5}; the event at exactly 1.5 is in segment 2 and maps to
  // its own anchor (1.5, single trial), staying put. The event at 0.2 is
  // before every segment and stays unshifted.
  auto pooled = asimm::adjusted_events(d, v0);
  std::sort(pooled[0].begin(), pooled[0].end());
  CHECK(pooled[0][0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(pooled[0][1] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("adjusted_events is the identity for zero shifts and constant onsets") {
  Dataset d;
  d.n = 1;
  d.R = 2;
  d.M = 1;
  d.horizon = 2.0;
  d.shifts = {0.4, 0.4};
  d.events = {EventTimes{{0.6, 1.1}, 2.0}, EventTimes{{0.9}, 2.0}};
  std::vector<double> v0 = {0.0};
  auto pooled = asimm::adjusted_events(d, v0);
  std::sort(pooled[0].begin(), pooled[0].end());
  CHECK(pooled[0] == std::vector<double>{0.6, 0.9, 1.1});
}

TEST_CASE("adjusted_events preserves event counts") {
  Dataset d = worked_example();
  auto init = asimm::init_shifts(d);
  auto pooled = asimm::adjusted_events(d, init.v);
  CHECK(pooled[0].size() == 3);
}

TEST_CASE("init_shifts is equivariant to permuting observations") {
  Dataset d = worked_example();
  Dataset swapped = d;
  std::swap(swapped.events[0], swapped.events[1]);
  std::swap(swapped.shifts[0], swapped.shifts[1]);
  CHECK(asimm::init_shifts(d).v == asimm::init_shifts(swapped).v);
}

TEST_CASE("init_memberships separates disjoint supports and is deterministic") {
  Dataset d;
  d.n = 8;
  d.R = 1;
  d.M = 1;
  d.horizon = 2.0;
  d.shifts = {0.0};
  for (int i = 0; i < 8; ++i) {
    EventTimes ev;
    ev.horizon = 2.0;
    double base = i < 4 ? 0.2 : 1.4;
    for (int j = 0; j < 6; ++j) ev.times.push_back(base + 0.05 * j);
    d.events.push_back(ev);
  }
  std::vector<double> v0(8, 0.0);
  auto labels = asimm::init_memberships(d, v0, 2, 64, 7);
  std::vector<int> truth = {0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(asimm::ari(labels, truth) == doctest::Approx(1.0));
  CHECK(labels == asimm::init_memberships(d, v0, 2, 64, 7));

  auto single = asimm::init_memberships(d, v0, 1, 64, 7);
  for (int label : single) CHECK(label == 0);
}

TEST_CASE("init_memberships keeps clusters nonempty for identical subjects") {
  Dataset d;
  d.n = 4;
  d.R = 1;
  d.M = 1;
  d.horizon = 2.0;
  d.shifts = {0.0};
  for (int i = 0; i < 4; ++i) d.events.push_back(EventTimes{{0.5, 1.0}, 2.0});
  std::vector<double> v0(4, 0.0);
  auto labels = asimm::init_memberships(d, v0, 2, 32, 3);
  std::vector<int> counts(2, 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  CHECK(counts[0] >= 1);
  CHECK(counts[1] >= 1);
}

TEST_CASE("init_memberships rejects K above the subject count") {
  Dataset d = worked_example();
  std::vector<double> v0 = {0.0};
  CHECK_THROWS(asimm::init_memberships(d, v0, 2, 32, 1));
}
