#include "asimm/event_data.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace asimm {

bool ValidationReport::only_warnings() const {
  for (const auto& issue : issues) {
    if (issue.code != ValidationCode::TimeEqualsShift &&
        issue.code != ValidationCode::TimeAtBoundary &&
        issue.code != ValidationCode::EmptySubject) {
      return false;
    }
  }
  return true;
}

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  auto add = [&](ValidationIssue issue) { report.issues.push_back(std::move(issue)); };

  const double T = dataset.horizon;
  for (int r = 0; r < dataset.R; ++r) {
    for (int m = 0; m < dataset.M; ++m) {
      double w = dataset.shift(r, m);
      if (!(w >= 0.0 && w < T)) {
        add({ValidationCode::ShiftOutOfRange, -1, r, m, w,
             "shift out of range [0, T) at observation " + std::to_string(r)});
      }
    }
  }

  for (int i = 0; i < dataset.n; ++i) {
    bool any_event = false;
    for (int r = 0; r < dataset.R; ++r) {
      const EventTimes& ev = dataset.at(i, r);
      if (ev.horizon != T) {
        add({ValidationCode::InconsistentHorizon, i, r, -1, ev.horizon,
             "observation horizon differs from dataset horizon"});
      }
      double prev = -1.0;
      for (double t : ev.times) {
        any_event = true;
        if (t == 0.0 || t == T) {
          add({ValidationCode::TimeAtBoundary, i, r, -1, t,
               t == T ? "time at horizon" : "time at origin"});
        } else if (t < 0.0 || t > T) {
          add({ValidationCode::TimeOutOfRange, i, r, -1, t, "event time outside [0, T]"});
        }
        if (t < prev) {
          add({ValidationCode::UnsortedTimes, i, r, -1, t, "event times not sorted"});
        }
        prev = t;
        for (int m = 0; m < dataset.M; ++m) {
          if (t == dataset.shift(r, m)) {
            add({ValidationCode::TimeEqualsShift, i, r, m, t,
                 "event time coincides with a stimulus onset"});
          }
        }
      }
    }
    if (!any_event && dataset.R > 0) {
      add({ValidationCode::EmptySubject, i, -1, -1, 0.0, "subject has no events"});
    }
  }
  return report;
}

std::vector<Complex> empirical_fourier(const EventTimes& events, int ell0) {
  if (ell0 < 1) throw std::invalid_argument("empirical_fourier: ell0 must be >= 1");
  if (events.horizon <= 0.0) throw std::invalid_argument("empirical_fourier: horizon must be > 0");
  const double T = events.horizon;
  std::vector<Complex> eta(static_cast<std::size_t>(2 * ell0 + 1));
  // Fill l >= 0 and mirror by conjugation; eta_0 = N/T exactly.
  for (int l = 0; l <= ell0; ++l) {
    Complex acc(0.0, 0.0);
    double base = -2.0 * std::numbers::pi * l / T;
    for (double t : events.times) {
      acc += Complex(std::cos(base * t), std::sin(base * t));
    }
    eta[static_cast<std::size_t>(ell0 + l)] = acc / T;
    if (l > 0) eta[static_cast<std::size_t>(ell0 - l)] = std::conj(acc) / T;
  }
  eta[static_cast<std::size_t>(ell0)] = Complex(static_cast<double>(events.times.size()) / T, 0.0);
  return eta;
}

SpectralData build_spectral(const Dataset& dataset, int ell0, WeightMode mode) {
  if (ell0 < 1) throw std::invalid_argument("build_spectral: ell0 must be >= 1");
  SpectralData out;
  out.n = dataset.n;
  out.R = dataset.R;
  out.M = dataset.M;
  out.ell0 = ell0;
  out.horizon = dataset.horizon;
  out.shifts = dataset.shifts;

  const std::size_t cells = static_cast<std::size_t>(dataset.n) * dataset.R;
  const std::size_t len = static_cast<std::size_t>(2 * ell0 + 1);
  out.eta.resize(cells * len);
  out.normalized.resize(cells * len);
  out.counts.resize(cells);
  out.weights.resize(cells);
  out.empty.resize(cells);

  for (int i = 0; i < dataset.n; ++i) {
    for (int r = 0; r < dataset.R; ++r) {
      const EventTimes& ev = dataset.at(i, r);
      std::vector<Complex> eta = empirical_fourier(ev, ell0);
      std::size_t cell = static_cast<std::size_t>(i) * dataset.R + r;
      double count = static_cast<double>(ev.count());
      out.counts[cell] = count;
      bool is_empty = ev.times.empty();
      out.empty[cell] = is_empty ? 1 : 0;
      out.weights[cell] = is_empty ? 0.0 : (mode == WeightMode::Count ? count : 1.0);
      for (std::size_t k = 0; k < len; ++k) {
        out.eta[cell * len + k] = eta[k];
        out.normalized[cell * len + k] = is_empty ? Complex(0.0, 0.0) : eta[k] / count;
      }
    }
  }
  return out;
}

}  // namespace asimm
