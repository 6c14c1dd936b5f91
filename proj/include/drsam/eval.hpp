#pragma once

// Detection metrics, per-1K-sample stage timings and the test-case protocol.
//
// Degenerate conventions: precision is 1 when nothing was predicted attack
// (tp+fp = 0), recall is 1 when there is no attack to find (tp+fn = 0), and
// f1 is 0 when precision+recall = 0. Scoring zero instances is an error.
//
// Timings are wall-clock milliseconds per 1000 samples: total stage time
// divided by (instances / 1000). Stats/flagging is "SPP", classification is
// "Test", rule mining is "RG".

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "drsam/detector.hpp"
#include "drsam/error.hpp"
#include "drsam/ingest.hpp"
#include "drsam/mining.hpp"
#include "drsam/preprocess.hpp"
#include "drsam/random.hpp"
#include "drsam/trace.hpp"

namespace drsam {

struct EvalReport {
  std::string test_case_id;
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  std::optional<double> spp_time_per_1k;   // ms
  std::optional<double> test_time_per_1k;  // ms
  std::optional<double> rg_time_per_1k;    // ms
  std::optional<std::uint64_t> split_seed;

  std::uint64_t instances() const noexcept { return tp + fp + tn + fn; }
  // Rule-generation rows carry timings only.
  bool scored() const noexcept { return instances() > 0; }
};

inline void set_metrics(EvalReport& r) {
  const auto total = r.instances();
  if (total == 0) throw ValidationError("cannot score zero instances");
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  r.accuracy = d(r.tp + r.tn) / d(total);
  r.precision = (r.tp + r.fp) == 0 ? 1.0 : d(r.tp) / d(r.tp + r.fp);
  r.recall = (r.tp + r.fn) == 0 ? 1.0 : d(r.tp) / d(r.tp + r.fn);
  r.f1 = (r.precision + r.recall) == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
}

inline EvalReport score_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn,
                               std::string test_case_id = {}) {
  EvalReport r;
  r.test_case_id = std::move(test_case_id);
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  set_metrics(r);
  return r;
}

inline void accumulate(EvalReport& r, std::span<const Label> predicted, std::span<const Label> labels) {
  if (predicted.size() != labels.size()) {
    throw ValidationError("score: " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predicted[i]) {
      ++(labels[i] ? r.tp : r.fp);
    } else {
      ++(labels[i] ? r.fn : r.tn);
    }
  }
}

inline EvalReport score(const Detection& det, std::span<const Label> labels, std::string test_case_id = {}) {
  EvalReport r;
  r.test_case_id = std::move(test_case_id);
  accumulate(r, det.predicted, labels);
  set_metrics(r);
  return r;
}

namespace detail {

using clock = std::chrono::steady_clock;

inline double elapsed_ms(clock::time_point since) {
  return std::chrono::duration<double, std::milli>(clock::now() - since).count();
}

inline std::optional<double> per_1k(double ms, std::size_t samples) {
  if (samples == 0) return std::nullopt;
  return ms / (static_cast<double>(samples) / 1000.0);
}

}  // namespace detail

struct TestCaseRun {
  EvalReport report;
  std::vector<Detection> detections;  // one per trace, in input order
};

// Flags every trace against its own statistics and classifies every row with
// the supplied rules; nothing is filtered at test time.
inline TestCaseRun run_traces(std::string test_case_id, std::span<const WorkloadTrace> traces, const RuleSet& rules,
                              const PreprocessConfig& cfg) {
  if (traces.empty()) throw ValidationError("test case '" + test_case_id + "' has no traces");
  cfg.validate();
  TestCaseRun run;
  auto& r = run.report;
  r.test_case_id = std::move(test_case_id);
  double spp_ms = 0.0, test_ms = 0.0;
  std::size_t samples = 0;
  for (const auto& t : traces) {
    validate_trace(t, rules.schema);
    auto start = detail::clock::now();
    const auto fm = flag(t, compute_stats(t), cfg);
    spp_ms += detail::elapsed_ms(start);
    start = detail::clock::now();
    auto det = classify(fm, rules);
    test_ms += detail::elapsed_ms(start);
    accumulate(r, det.predicted, t.labels);
    samples += t.rows();
    run.detections.push_back(std::move(det));
  }
  set_metrics(r);
  r.spp_time_per_1k = detail::per_1k(spp_ms, samples);
  r.test_time_per_1k = detail::per_1k(test_ms, samples);
  return run;
}

inline EvalReport evaluate_traces(std::string test_case_id, std::span<const WorkloadTrace> traces, const RuleSet& rules,
                                  const PreprocessConfig& cfg) {
  return run_traces(std::move(test_case_id), traces, rules, cfg).report;
}

struct TestCaseSpec {
  std::string id;
  std::vector<std::filesystem::path> files;
};

inline EvalReport run_test_case(const TestCaseSpec& tc, const RuleSet& rules, const PreprocessConfig& cfg) {
  std::vector<WorkloadTrace> traces;
  for (const auto& f : tc.files) {
    if (!std::filesystem::exists(f)) throw IoError("test case '" + tc.id + "': missing file '" + f.string() + "'");
    traces.push_back(read_trace(f, rules.schema));
  }
  return evaluate_traces(tc.id, traces, rules, cfg);
}

struct RuleGeneration {
  RuleSet rules;
  EvalReport timing;  // the "RG" row: spp and rg timings per 1K training samples
  std::size_t mining_rows = 0;  // K
};

// Preprocesses and filters the training traces, then mines rules.
inline RuleGeneration generate_rule_set(std::span<const WorkloadTrace> traces, const FeatureSchema& schema,
                                        const PreprocessConfig& pcfg, const MiningConfig& mcfg, std::string source) {
  if (traces.empty()) throw ValidationError("rule generation needs at least one trace");
  pcfg.validate();
  mcfg.validate(schema.q());
  std::size_t samples = 0;
  auto start = detail::clock::now();
  std::vector<FlagMatrix> kept;
  for (const auto& t : traces) {
    validate_trace(t, schema);
    kept.push_back(filter_instances(flag(t, compute_stats(t), pcfg), pcfg));
    samples += t.rows();
  }
  const auto ds = concatenate(kept);
  const double spp_ms = detail::elapsed_ms(start);
  start = detail::clock::now();
  auto rules = mine_rules(ds, mcfg, schema, std::move(source));
  const double rg_ms = detail::elapsed_ms(start);

  RuleGeneration out{std::move(rules), {}, ds.size()};
  out.timing.test_case_id = "RG";
  out.timing.spp_time_per_1k = detail::per_1k(spp_ms, samples);
  out.timing.rg_time_per_1k = detail::per_1k(rg_ms, samples);
  return out;
}

struct TraceSplit {
  WorkloadTrace train;
  WorkloadTrace test;
};

// Seeded instance-level split: a Fisher-Yates shuffle of row indices picks
// floor(train_fraction * p) training rows; both halves keep the original
// row order.
inline TraceSplit split_trace(const WorkloadTrace& trace, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train fraction must lie in (0,1)");
  const auto p = trace.rows();
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(p)));
  if (n_train == 0 || n_train == p) {
    throw ValidationError("trace '" + trace.workload_id + "' is too short to split");
  }
  std::vector<std::size_t> idx(p);
  for (std::size_t i = 0; i < p; ++i) idx[i] = i;
  Rng rng(derive_seed(seed, fnv1a(trace.workload_id)));
  rng.shuffle(std::span<std::size_t>(idx));
  std::vector<bool> in_train(p, false);
  for (std::size_t k = 0; k < n_train; ++k) in_train[idx[k]] = true;

  TraceSplit s;
  s.train.workload_id = trace.workload_id;
  s.test.workload_id = trace.workload_id;
  for (std::size_t i = 0; i < p; ++i) {
    auto& dst = in_train[i] ? s.train : s.test;
    dst.values.push_back(trace.values[i]);
    dst.labels.push_back(trace.labels[i]);
  }
  return s;
}

// Comparison table: one row per report, "-" where a column does not apply.
struct ComparisonTable {
  std::string text;
  std::string csv;
};

namespace detail {

inline std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v * 100.0 << '%';
  return os.str();
}

inline std::string millis(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << *v << "ms";
  return os.str();
}

inline std::string csv_num(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

}  // namespace detail

inline ComparisonTable compare_report(std::span<const EvalReport> reports) {
  const std::vector<std::string> header{"Model", "Accuracy", "Precision", "Recall", "F1 Score",
                                        "RG Time/1K", "SPP Time/1K", "Test Time/1K"};
  std::vector<std::vector<std::string>> rows{header};
  for (const auto& r : reports) {
    const bool s = r.scored();
    rows.push_back({r.test_case_id, s ? detail::percent(r.accuracy) : "-", s ? detail::percent(r.precision) : "-",
                    s ? detail::percent(r.recall) : "-", s ? detail::percent(r.f1) : "-", detail::millis(r.rg_time_per_1k),
                    detail::millis(r.spp_time_per_1k), detail::millis(r.test_time_per_1k)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream text;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < rows[k].size(); ++c) {
      text << (c ? " | " : "") << std::left << std::setw(static_cast<int>(width[c])) << rows[k][c];
    }
    text << '\n';
    if (k == 0) {
      for (std::size_t c = 0; c < width.size(); ++c) text << (c ? "-+-" : "") << std::string(width[c], '-');
      text << '\n';
    }
  }

  std::ostringstream csv;
  csv << "test_case_id,instances,tp,fp,tn,fn,accuracy,precision,recall,f1,"
         "rg_time_per_1k_ms,spp_time_per_1k_ms,test_time_per_1k_ms\n";
  for (const auto& r : reports) {
    csv << r.test_case_id << ',' << r.instances() << ',' << r.tp << ',' << r.fp << ',' << r.tn << ',' << r.fn << ',';
    if (r.scored()) {
      csv << format_double(r.accuracy) << ',' << format_double(r.precision) << ',' << format_double(r.recall) << ','
          << format_double(r.f1) << ',';
    } else {
      csv << ",,,,";
    }
    csv << detail::csv_num(r.rg_time_per_1k) << ',' << detail::csv_num(r.spp_time_per_1k) << ','
        << detail::csv_num(r.test_time_per_1k) << '\n';
  }
  return {text.str(), csv.str()};
}

}  // namespace drsam
