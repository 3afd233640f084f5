#include "asimm/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace asimm::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

json curve_to_json(const SpectralCurve& curve) {
  json arr = json::array();
  for (int l = -curve.ell0(); l <= curve.ell0(); ++l) {
    arr.push_back({{"l", l}, {"re", curve.coeff(l).real()}, {"im", curve.coeff(l).imag()}});
  }
  return arr;
}

SpectralCurve curve_from_json(const json& arr, double horizon) {
  int ell0 = static_cast<int>(arr.size() / 2);
  std::vector<Complex> coeffs(arr.size());
  for (const auto& entry : arr) {
    int l = entry.at("l").get<int>();
    coeffs[static_cast<std::size_t>(l + ell0)] =
        Complex(entry.at("re").get<double>(), entry.at("im").get<double>());
  }
  return SpectralCurve(std::move(coeffs), horizon);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string weight_mode_name(WeightMode mode) {
  return mode == WeightMode::Count ? "count" : "uniform";
}

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "count") return WeightMode::Count;
  if (name == "uniform") return WeightMode::Uniform;
  throw std::invalid_argument("unknown weight mode: " + name);
}

void write_dataset_csv(const Dataset& dataset, const std::string& events_path,
                       const std::string& shifts_path) {
  {
    std::ofstream out = open_out(events_path);
    out << "subject_id,trial_id,event_time\n";
    for (int i = 0; i < dataset.n; ++i) {
      for (int r = 0; r < dataset.R; ++r) {
        for (double t : dataset.at(i, r).times) {
          out << (i + 1) << ',' << (r + 1) << ',' << format_double(t) << '\n';
        }
      }
    }
  }
  {
    std::ofstream out = open_out(shifts_path);
    out << "trial_id,component,shift\n";
    for (int r = 0; r < dataset.R; ++r) {
      for (int m = 0; m < dataset.M; ++m) {
        out << (r + 1) << ',' << (m + 1) << ',' << format_double(dataset.shift(r, m)) << '\n';
      }
    }
  }
}

Dataset read_dataset_csv(const std::string& events_path, const std::string& shifts_path,
                         double horizon) {
  if (horizon <= 0.0) throw std::invalid_argument("read_dataset_csv: horizon must be positive");

  std::map<long long, std::map<int, double>> shift_rows;  // trial -> component -> shift
  {
    std::ifstream in = open_in(shifts_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty shifts CSV: " + shifts_path);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto fields = split_csv_line(line);
      if (fields.size() != 3) throw std::runtime_error("bad shifts CSV row: " + line);
      shift_rows[std::stoll(fields[0])][std::stoi(fields[1])] = std::stod(fields[2]);
    }
  }
  if (shift_rows.empty()) throw std::runtime_error("shifts CSV has no rows: " + shifts_path);

  int M = 0;
  for (const auto& [trial, comps] : shift_rows) {
    for (const auto& [m, w] : comps) M = std::max(M, m);
  }

  std::map<long long, std::map<long long, std::vector<double>>> events;  // subject -> trial -> times
  std::set<long long> subject_ids;
  {
    std::ifstream in = open_in(events_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty events CSV: " + events_path);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto fields = split_csv_line(line);
      if (fields.size() != 3) throw std::runtime_error("bad events CSV row: " + line);
      long long subject = std::stoll(fields[0]);
      long long trial = std::stoll(fields[1]);
      subject_ids.insert(subject);
      events[subject][trial].push_back(std::stod(fields[2]));
    }
  }

  Dataset dataset;
  dataset.n = static_cast<int>(subject_ids.size());
  dataset.R = static_cast<int>(shift_rows.size());
  dataset.M = M;
  dataset.horizon = horizon;
  dataset.shifts.assign(static_cast<std::size_t>(dataset.R) * M, 0.0);
  dataset.events.assign(static_cast<std::size_t>(dataset.n) * dataset.R,
                        EventTimes{{}, horizon});

  std::map<long long, int> trial_index;
  int r = 0;
  for (const auto& [trial, comps] : shift_rows) {
    trial_index[trial] = r;
    for (const auto& [m, w] : comps) {
      dataset.shifts[static_cast<std::size_t>(r) * M + (m - 1)] = w;
    }
    ++r;
  }
  std::map<long long, int> subject_index;
  int i = 0;
  for (long long id : subject_ids) subject_index[id] = i++;

  for (auto& [subject, trials] : events) {
    for (auto& [trial, times] : trials) {
      auto it = trial_index.find(trial);
      if (it == trial_index.end()) {
        throw std::runtime_error("events CSV references unknown trial " + std::to_string(trial));
      }
      std::sort(times.begin(), times.end());
      dataset.at(subject_index[subject], it->second) = EventTimes{std::move(times), horizon};
    }
  }
  return dataset;
}

void write_dataset_json(const Dataset& dataset, const std::string& path) {
  json doc;
  doc["T"] = dataset.horizon;
  doc["M"] = dataset.M;
  json trials = json::array();
  for (int r = 0; r < dataset.R; ++r) {
    json trial;
    trial["id"] = r + 1;
    json shifts = json::array();
    for (int m = 0; m < dataset.M; ++m) shifts.push_back(dataset.shift(r, m));
    trial["shifts"] = shifts;
    json subjects = json::array();
    for (int i = 0; i < dataset.n; ++i) {
      subjects.push_back({{"id", i + 1}, {"events", dataset.at(i, r).times}});
    }
    trial["subjects"] = subjects;
    trials.push_back(std::move(trial));
  }
  doc["trials"] = std::move(trials);
  open_out(path) << doc.dump(2) << '\n';
}

Dataset read_dataset_json(const std::string& path) {
  json doc = json::parse(open_in(path));
  Dataset dataset;
  dataset.horizon = doc.at("T").get<double>();
  dataset.M = doc.at("M").get<int>();
  const json& trials = doc.at("trials");
  dataset.R = static_cast<int>(trials.size());

  std::set<long long> subject_ids;
  for (const auto& trial : trials) {
    for (const auto& subj : trial.at("subjects")) {
      subject_ids.insert(subj.at("id").get<long long>());
    }
  }
  std::map<long long, int> subject_index;
  int i = 0;
  for (long long id : subject_ids) subject_index[id] = i++;

  dataset.n = static_cast<int>(subject_ids.size());
  dataset.shifts.assign(static_cast<std::size_t>(dataset.R) * dataset.M, 0.0);
  dataset.events.assign(static_cast<std::size_t>(dataset.n) * dataset.R,
                        EventTimes{{}, dataset.horizon});

  for (int r = 0; r < dataset.R; ++r) {
    const json& trial = trials[static_cast<std::size_t>(r)];
    const json& shifts = trial.at("shifts");
    if (static_cast<int>(shifts.size()) != dataset.M) {
      throw std::runtime_error("dataset JSON: trial shift count does not match M");
    }
    for (int m = 0; m < dataset.M; ++m) {
      dataset.shifts[static_cast<std::size_t>(r) * dataset.M + m] = shifts[static_cast<std::size_t>(m)].get<double>();
    }
    for (const auto& subj : trial.at("subjects")) {
      int idx = subject_index[subj.at("id").get<long long>()];
      std::vector<double> times = subj.at("events").get<std::vector<double>>();
      dataset.at(idx, r) = EventTimes{std::move(times), dataset.horizon};
    }
  }
  return dataset;
}

void write_truth_json(const GroundTruth& truth, int n, int R, std::uint64_t seed,
                      std::uint64_t replicate, const std::string& path) {
  json doc;
  doc["scenario"] = truth.scenario;
  doc["T"] = truth.horizon;
  doc["K"] = truth.K;
  doc["M"] = truth.M;
  doc["n"] = n;
  doc["R"] = R;
  doc["tau"] = truth.tau;
  doc["rho"] = truth.rho;
  doc["seed"] = seed;
  doc["replicate"] = replicate;
  json z = json::array();
  for (int label : truth.z) z.push_back(label + 1);
  doc["z"] = std::move(z);
  json v = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int m = 0; m < truth.M; ++m) row.push_back(truth.v[static_cast<std::size_t>(i) * truth.M + m]);
    v.push_back(std::move(row));
  }
  doc["v"] = std::move(v);
  json w = json::array();
  for (int r = 0; r < R; ++r) {
    json row = json::array();
    for (int m = 0; m < truth.M; ++m) row.push_back(truth.w[static_cast<std::size_t>(r) * truth.M + m]);
    w.push_back(std::move(row));
  }
  doc["w"] = std::move(w);
  doc["baseline"] = truth.baseline;
  doc["lambda"] = truth.lambda;
  json comps = json::array();
  for (int k = 0; k < truth.K; ++k) {
    for (int m = 0; m < truth.M; ++m) {
      json terms = json::array();
      for (const ComponentTerm& term : truth.component(k, m).terms) {
        terms.push_back({{"base", term.base},
                         {"coef", term.coef},
                         {"scale", term.scale},
                         {"offset", term.offset}});
      }
      comps.push_back({{"k", k + 1}, {"m", m + 1}, {"terms", std::move(terms)}});
    }
  }
  doc["components"] = std::move(comps);
  open_out(path) << doc.dump(2) << '\n';
}

TruthFile read_truth_json(const std::string& path) {
  json doc = json::parse(open_in(path));
  TruthFile file;
  GroundTruth& truth = file.truth;
  truth.scenario = doc.at("scenario").get<int>();
  truth.horizon = doc.at("T").get<double>();
  truth.K = doc.at("K").get<int>();
  truth.M = doc.at("M").get<int>();
  file.n = doc.at("n").get<int>();
  file.R = doc.at("R").get<int>();
  truth.tau = doc.at("tau").get<double>();
  truth.rho = doc.at("rho").get<double>();
  file.seed = doc.at("seed").get<std::uint64_t>();
  file.replicate = doc.at("replicate").get<std::uint64_t>();
  for (const auto& label : doc.at("z")) truth.z.push_back(label.get<int>() - 1);
  for (const auto& row : doc.at("v")) {
    for (const auto& x : row) truth.v.push_back(x.get<double>());
  }
  for (const auto& row : doc.at("w")) {
    for (const auto& x : row) truth.w.push_back(x.get<double>());
  }
  truth.baseline = doc.at("baseline").get<std::vector<double>>();
  truth.lambda = doc.at("lambda").get<std::vector<double>>();
  truth.components.resize(static_cast<std::size_t>(truth.K) * truth.M);
  for (const auto& comp : doc.at("components")) {
    int k = comp.at("k").get<int>() - 1;
    int m = comp.at("m").get<int>() - 1;
    IntensityComponent component;
    for (const auto& term : comp.at("terms")) {
      component.terms.push_back(ComponentTerm{term.at("base").get<int>(),
                                              term.at("coef").get<double>(),
                                              term.at("scale").get<double>(),
                                              term.at("offset").get<double>()});
    }
    truth.components[static_cast<std::size_t>(k) * truth.M + m] = std::move(component);
  }
  return file;
}

void write_fit_result_json(const FitResult& result, const FitConfig& config,
                           const std::string& path, int report_grid) {
  const ModelParams& params = result.params;
  json doc;
  doc["T"] = params.horizon;
  doc["K"] = params.K;
  doc["M"] = params.M;
  doc["ell0"] = params.ell0;
  json labels = json::array();
  for (int label : params.z) labels.push_back(label + 1);
  doc["labels"] = std::move(labels);
  json shifts = json::array();
  for (int i = 0; i < params.n(); ++i) {
    json row = json::array();
    for (int m = 0; m < params.M; ++m) row.push_back(params.shift(i, m));
    shifts.push_back(std::move(row));
  }
  doc["shifts"] = std::move(shifts);
  doc["lambda"] = params.lambda;
  doc["baseline_normalized"] = params.a_prime;
  json baseline = json::array();
  for (int k = 0; k < params.K; ++k) baseline.push_back(params.baseline(k));
  doc["baseline"] = std::move(baseline);

  json comps = json::array();
  for (int k = 0; k < params.K; ++k) {
    for (int m = 0; m < params.M; ++m) {
      json comp;
      comp["k"] = k + 1;
      comp["m"] = m + 1;
      comp["coefficients"] = curve_to_json(params.component(k, m));
      comp["grid"] = synthesize(params.component_unnormalized(k, m), report_grid);
      comps.push_back(std::move(comp));
    }
  }
  doc["components"] = std::move(comps);

  doc["trace"] = result.trace;
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["objective"] = result.objective;
  doc["restart_index"] = result.restart_index;
  doc["subject_criterion"] = result.subject_criterion;

  json diag;
  diag["boundary_nudges"] = result.diag.boundary_nudges;
  diag["empty_observations"] = result.diag.empty_observations;
  diag["rescued_clusters"] = result.diag.rescued_clusters;
  json ill = json::array();
  for (auto [k, l] : result.diag.ill_conditioned) ill.push_back({k + 1, l});
  diag["ill_conditioned"] = std::move(ill);
  json neg = json::array();
  for (int k : result.diag.negative_baseline) neg.push_back(k + 1);
  diag["negative_baseline"] = std::move(neg);
  diag["warnings"] = result.diag.warnings;
  doc["diagnostics"] = std::move(diag);

  json cfg;
  cfg["K"] = config.K;
  cfg["gamma"] = config.gamma;
  cfg["ell0"] = config.ell0;
  cfg["epsilon"] = config.epsilon;
  cfg["max_outer_iters"] = config.max_outer_iters;
  cfg["newton_max_iters"] = config.newton.max_iters;
  cfg["newton_grad_tol"] = config.newton.grad_tol;
  cfg["weights"] = weight_mode_name(config.weight_mode);
  cfg["seed"] = config.seed;
  cfg["restarts"] = config.restarts;
  cfg["known_v"] = config.fixed_shifts.has_value();
  doc["config"] = std::move(cfg);

  open_out(path) << doc.dump(2) << '\n';
}

FitFile read_fit_result_json(const std::string& path) {
  json doc = json::parse(open_in(path));
  FitFile file;
  ModelParams& params = file.result.params;
  params.horizon = doc.at("T").get<double>();
  params.K = doc.at("K").get<int>();
  params.M = doc.at("M").get<int>();
  params.ell0 = doc.at("ell0").get<int>();
  for (const auto& label : doc.at("labels")) params.z.push_back(label.get<int>() - 1);
  for (const auto& row : doc.at("shifts")) {
    for (const auto& x : row) params.v.push_back(x.get<double>());
  }
  params.lambda = doc.at("lambda").get<std::vector<double>>();
  params.a_prime = doc.at("baseline_normalized").get<std::vector<double>>();
  params.phi.reserve(static_cast<std::size_t>(params.K) * params.M);
  std::vector<SpectralCurve> curves;
  curves.reserve(static_cast<std::size_t>(params.K) * params.M);
  for (int idx = 0; idx < params.K * params.M; ++idx) curves.push_back(SpectralCurve::zero(params.ell0, params.horizon));
  for (const auto& comp : doc.at("components")) {
    int k = comp.at("k").get<int>() - 1;
    int m = comp.at("m").get<int>() - 1;
    curves[static_cast<std::size_t>(k) * params.M + m] =
        curve_from_json(comp.at("coefficients"), params.horizon);
  }
  params.phi = std::move(curves);

  file.result.trace = doc.at("trace").get<std::vector<double>>();
  file.result.iterations = doc.at("iterations").get<int>();
  file.result.converged = doc.at("converged").get<bool>();
  file.result.objective = doc.at("objective").get<double>();
  file.result.restart_index = doc.at("restart_index").get<int>();
  file.result.subject_criterion = doc.at("subject_criterion").get<std::vector<double>>();

  const json& cfg = doc.at("config");
  file.config.K = cfg.at("K").get<int>();
  file.config.gamma = cfg.at("gamma").get<double>();
  file.config.ell0 = cfg.at("ell0").get<int>();
  file.config.epsilon = cfg.at("epsilon").get<double>();
  file.config.max_outer_iters = cfg.at("max_outer_iters").get<int>();
  file.config.newton.max_iters = cfg.at("newton_max_iters").get<int>();
  file.config.newton.grad_tol = cfg.at("newton_grad_tol").get<double>();
  file.config.weight_mode = parse_weight_mode(cfg.at("weights").get<std::string>());
  file.config.seed = cfg.at("seed").get<std::uint64_t>();
  file.config.restarts = cfg.at("restarts").get<int>();
  return file;
}

void write_trace_csv(std::span<const double> trace, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "iteration,objective\n";
  for (std::size_t s = 0; s < trace.size(); ++s) {
    out << (s + 1) << ',' << format_double(trace[s]) << '\n';
  }
}

void write_aggregated_intensity_csv(const Dataset& dataset, int bins, const std::string& path) {
  if (bins < 1) throw std::invalid_argument("write_aggregated_intensity_csv: bins must be >= 1");
  std::ofstream out = open_out(path);
  out << "subject_id,t,intensity\n";
  const double T = dataset.horizon;
  const double width = T / bins;
  std::vector<double> histogram(static_cast<std::size_t>(bins));
  for (int i = 0; i < dataset.n; ++i) {
    std::fill(histogram.begin(), histogram.end(), 0.0);
    for (int r = 0; r < dataset.R; ++r) {
      for (double t : dataset.at(i, r).times) {
        int b = std::min(bins - 1, static_cast<int>(t / T * bins));
        histogram[static_cast<std::size_t>(std::max(0, b))] += 1.0;
      }
    }
    for (int b = 0; b < bins; ++b) {
      double center = (b + 0.5) * width;
      double intensity = histogram[static_cast<std::size_t>(b)] / (dataset.R * width);
      out << (i + 1) << ',' << format_double(center) << ',' << format_double(intensity) << '\n';
    }
  }
}

void write_curve_csv(const std::string& key_name, std::span<const double> keys,
                     std::span<const double> l1, std::span<const double> l2,
                     std::span<const double> objective, const std::string& path) {
  std::ofstream out = open_out(path);
  out << key_name << ",L1,L2,objective\n";
  for (std::size_t j = 0; j < keys.size(); ++j) {
    out << format_double(keys[j]) << ',' << (j < l1.size() ? format_double(l1[j]) : "") << ','
        << (j < l2.size() ? format_double(l2[j]) : "") << ','
        << (j < objective.size() ? format_double(objective[j]) : "") << '\n';
  }
}

}  // namespace asimm::io
