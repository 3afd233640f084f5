#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asimm/spectral.hpp"

namespace asimm {

/// Sorted event times of one observation on (0, T).
struct EventTimes {
  std::vector<double> times;
  double horizon = 0.0;

  std::int64_t count() const { return static_cast<std::int64_t>(times.size()); }
};

/// Recurrent-event data: n subjects, R repeated observations, M stimulus
/// components. events is an n x R grid; shifts holds the known
/// observation-specific onset w*_{r,m} in seconds, each in [0, T).
struct Dataset {
  int n = 0;
  int R = 0;
  int M = 0;
  double horizon = 0.0;
  std::vector<EventTimes> events;  // index i*R + r
  std::vector<double> shifts;      // index r*M + m

  const EventTimes& at(int i, int r) const {
    return events[static_cast<std::size_t>(i) * R + r];
  }
  EventTimes& at(int i, int r) { return events[static_cast<std::size_t>(i) * R + r]; }
  double shift(int r, int m) const { return shifts[static_cast<std::size_t>(r) * M + m]; }
};

enum class ValidationCode {
  TimeOutOfRange,
  TimeAtBoundary,
  UnsortedTimes,
  ShiftOutOfRange,
  EmptySubject,
  TimeEqualsShift,
  InconsistentHorizon,
};

struct ValidationIssue {
  ValidationCode code;
  int subject = -1;      // -1 when not subject-specific
  int observation = -1;  // -1 when not observation-specific
  int component = -1;
  double value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  /// True when no issue is worse than a warning (ties, boundary times).
  bool only_warnings() const;
};

/// Structural and range checks; returns a report and never throws.
ValidationReport validate(const Dataset& dataset);

enum class WeightMode { Count, Uniform };

/// Empirical Fourier coefficients of the observed point measures plus
/// per-observation counts and loss weights. eta is laid out per (i, r) as
/// 2*ell0+1 values indexed by l + ell0; eta_0 = N/T exactly.
struct SpectralData {
  int n = 0;
  int R = 0;
  int M = 0;
  int ell0 = 0;
  double horizon = 0.0;
  std::vector<Complex> eta;          // (i*R + r) * (2*ell0+1) + (l + ell0)
  std::vector<Complex> normalized;   // eta / N, zero rows for empty observations
  std::vector<double> counts;        // N_{i,r}(T)
  std::vector<double> weights;       // beta_{i,r}; 0 for empty observations
  std::vector<std::uint8_t> empty;   // 1 when N_{i,r}(T) == 0
  std::vector<double> shifts;        // copy of dataset shifts, r*M + m

  int coeff_len() const { return 2 * ell0 + 1; }
  std::size_t row(int i, int r) const {
    return (static_cast<std::size_t>(i) * R + r) * static_cast<std::size_t>(coeff_len());
  }
  Complex eta_at(int i, int r, int l) const { return eta[row(i, r) + (l + ell0)]; }
  Complex norm_at(int i, int r, int l) const { return normalized[row(i, r) + (l + ell0)]; }
  double count_at(int i, int r) const { return counts[static_cast<std::size_t>(i) * R + r]; }
  double weight_at(int i, int r) const { return weights[static_cast<std::size_t>(i) * R + r]; }
  double shift(int r, int m) const { return shifts[static_cast<std::size_t>(r) * M + m]; }
};

/// Fourier coefficients of the empirical point measure:
/// eta_l = T^{-1} sum_j exp(-j 2 pi l t_j / T) for |l| <= ell0.
/// An empty event list yields all-zero coefficients.
std::vector<Complex> empirical_fourier(const EventTimes& events, int ell0);

/// Applies empirical_fourier to every (i, r) and fills loss weights:
/// beta = N under Count mode, beta = 1 under Uniform mode. Observations
/// with N = 0 get beta = 0 and are flagged empty.
SpectralData build_spectral(const Dataset& dataset, int ell0, WeightMode mode);

}  // namespace asimm
