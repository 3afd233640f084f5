#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asimm/driver.hpp"
#include "asimm/event_data.hpp"
#include "asimm/model.hpp"
#include "asimm/simgen.hpp"

namespace asimm::io {

/// Shortest round-trip decimal form of a double (for CSV output).
std::string format_double(double x);

/// Long-form events CSV (`subject_id,trial_id,event_time`) plus the
/// companion shifts CSV (`trial_id,component,shift`). Ids are 1-based.
void write_dataset_csv(const Dataset& dataset, const std::string& events_path,
                       const std::string& shifts_path);

/// Reads the CSV pair back; the horizon is not part of the text format and
/// must be supplied. Event times are sorted within each cell on ingest.
Dataset read_dataset_csv(const std::string& events_path, const std::string& shifts_path,
                         double horizon);

/// Single-document JSON form:
/// {T, M, trials:[{id, shifts:[...], subjects:[{id, events:[...]}]}]}.
void write_dataset_json(const Dataset& dataset, const std::string& path);
Dataset read_dataset_json(const std::string& path);

struct TruthFile {
  GroundTruth truth;
  int n = 0;
  int R = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

void write_truth_json(const GroundTruth& truth, int n, int R, std::uint64_t seed,
                      std::uint64_t replicate, const std::string& path);
TruthFile read_truth_json(const std::string& path);

struct FitFile {
  FitResult result;
  FitConfig config;
};

/// Fit result as one JSON document: labels, shifts, Lambda, baselines,
/// per-(k,m) coefficient tables ({l, re, im} triples plus T) and the
/// synthesized un-normalized components on the reporting grid, plus trace
/// and diagnostics and the fit configuration.
void write_fit_result_json(const FitResult& result, const FitConfig& config,
                           const std::string& path, int report_grid = 1024);
FitFile read_fit_result_json(const std::string& path);

void write_trace_csv(std::span<const double> trace, const std::string& path);

/// Per-subject empirical intensity aggregated across observations,
/// binned on a uniform grid: rows `subject_id,t,intensity` with
/// intensity = count in bin / (R * bin width). This is the input that
/// external curve-clustering tools consume.
void write_aggregated_intensity_csv(const Dataset& dataset, int bins, const std::string& path);

/// Tuning curves: one row per grid value with L1, L2 and objective columns.
void write_curve_csv(const std::string& key_name, std::span<const double> keys,
                     std::span<const double> l1, std::span<const double> l2,
                     std::span<const double> objective, const std::string& path);

std::string weight_mode_name(WeightMode mode);
WeightMode parse_weight_mode(const std::string& name);

}  // namespace asimm::io
