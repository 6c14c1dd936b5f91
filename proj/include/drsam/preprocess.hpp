#pragma once

// Statistical preprocessing: per-workload feature statistics, 3-sigma
// flagging, triggered-feature counting, transient-window filtering and
// concatenation into the mining dataset.
//
// Statistics are population statistics (divide by p_m) over every row of one
// workload file, whatever its label. Attack rows therefore inflate sigma;
// that is the behavior of the method, not an accident of this code.
//
// Flag evaluation order is fixed so that independent checks can reproduce it
// bit for bit. Per column j:
//   MeanPlusKSigma:  threshold = mean[j] + (k * stddev[j]);  flag = x > threshold
//   KSigmaAbsolute:  threshold = k * stddev[j];              flag = x > threshold
// and a column with stddev[j] == 0 never flags, in either mode.
//
// Filtering is a training-only step. Evaluation classifies every row of a
// test trace, flagged against that trace's own statistics.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "drsam/error.hpp"
#include "drsam/trace.hpp"

namespace drsam {

enum class FlagRule {
  MeanPlusKSigma,  // x > mean + k*sigma
  KSigmaAbsolute,  // x > k*sigma
};

enum class TriggerThreshold {
  AtLeastQMinus3,         // t >= q-3
  StrictlyGreaterQMinus3  // t >  q-3
};

struct PreprocessConfig {
  double sigma_multiplier = 3.0;
  TriggerThreshold trigger_threshold = TriggerThreshold::AtLeastQMinus3;
  FlagRule flag_rule = FlagRule::MeanPlusKSigma;

  void validate() const {
    if (!(sigma_multiplier > 0.0) || !std::isfinite(sigma_multiplier)) {
      throw ValidationError("sigma multiplier must be a finite value > 0");
    }
  }
};

inline FeatureStats compute_stats(const WorkloadTrace& trace) {
  if (trace.values.empty()) throw ValidationError("cannot compute statistics of an empty trace");
  const auto p = trace.rows();
  const auto q = trace.values.front().size();
  FeatureStats s{std::vector<double>(q, 0.0), std::vector<double>(q, 0.0)};
  for (std::size_t j = 0; j < q; ++j) {
    const double first = trace.values[0][j];
    bool constant = true;
    double sum = 0.0;
    for (const auto& row : trace.values) {
      sum += row[j];
      constant = constant && row[j] == first;
    }
    if (constant) {
      s.mean[j] = first;
      continue;
    }
    const double mean = sum / static_cast<double>(p);
    double ss = 0.0;
    for (const auto& row : trace.values) {
      const double d = row[j] - mean;
      ss += d * d;
    }
    s.mean[j] = mean;
    s.stddev[j] = std::sqrt(ss / static_cast<double>(p));
  }
  return s;
}

// Per-column flag thresholds; +inf marks a column that cannot flag.
inline std::vector<double> flag_thresholds(const FeatureStats& stats, const PreprocessConfig& cfg) {
  std::vector<double> thr(stats.q());
  for (std::size_t j = 0; j < stats.q(); ++j) {
    if (stats.stddev[j] == 0.0) {
      thr[j] = HUGE_VAL;
    } else if (cfg.flag_rule == FlagRule::MeanPlusKSigma) {
      thr[j] = stats.mean[j] + (cfg.sigma_multiplier * stats.stddev[j]);
    } else {
      thr[j] = cfg.sigma_multiplier * stats.stddev[j];
    }
  }
  return thr;
}

inline FlagMatrix flag(const WorkloadTrace& trace, const FeatureStats& stats, const PreprocessConfig& cfg) {
  cfg.validate();
  if (stats.stddev.size() != stats.mean.size()) throw ValidationError("malformed feature statistics");
  const auto q = stats.q();
  if (q == 0 || q > kMaxFeatures) throw ValidationError("feature statistics have an unsupported width");
  const auto thr = flag_thresholds(stats, cfg);

  FlagMatrix fm;
  fm.workload_id = trace.workload_id;
  fm.q = q;
  fm.flags.reserve(trace.rows());
  fm.triggered_counts.reserve(trace.rows());
  for (std::size_t i = 0; i < trace.rows(); ++i) {
    const auto& row = trace.values[i];
    if (row.size() != q) {
      throw SchemaMismatch("row " + std::to_string(i) + " of '" + trace.workload_id + "' has " +
                           std::to_string(row.size()) + " values but the statistics cover q=" + std::to_string(q));
    }
    FlagRow r = 0;
    for (std::size_t j = 0; j < q; ++j) {
      if (row[j] > thr[j]) r |= FlagRow{1} << j;
    }
    fm.flags.push_back(r);
    fm.triggered_counts.push_back(popcount(r));
  }
  fm.labels = trace.labels;
  return fm;
}

// Stats and flags of one trace against its own statistics.
inline FlagMatrix flag(const WorkloadTrace& trace, const PreprocessConfig& cfg) {
  return flag(trace, compute_stats(trace), cfg);
}

// Smallest triggered count an attack row needs to survive filtering.
inline std::size_t min_attack_triggered(std::size_t q, TriggerThreshold mode) {
  const std::size_t base = q >= 3 ? q - 3 : 0;
  return mode == TriggerThreshold::AtLeastQMinus3 ? base : base + 1;
}

// Keeps every benign row and each attack row whose triggered count meets the
// threshold. Row order is preserved.
inline FlagMatrix filter_instances(const FlagMatrix& fm, const PreprocessConfig& cfg) {
  const auto need = min_attack_triggered(fm.q, cfg.trigger_threshold);
  FlagMatrix out;
  out.workload_id = fm.workload_id;
  out.q = fm.q;
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    if (fm.labels[i] == 0 || fm.triggered_counts[i] >= need) {
      out.flags.push_back(fm.flags[i]);
      out.triggered_counts.push_back(fm.triggered_counts[i]);
      out.labels.push_back(fm.labels[i]);
    }
  }
  return out;
}

inline MiningDataset concatenate(std::span<const FlagMatrix> filtered) {
  if (filtered.empty()) throw ValidationError("nothing to concatenate");
  MiningDataset ds;
  ds.q = filtered.front().q;
  for (const auto& fm : filtered) {
    if (fm.q != ds.q) {
      throw SchemaMismatch("cannot concatenate '" + fm.workload_id + "' (q=" + std::to_string(fm.q) +
                           ") with q=" + std::to_string(ds.q));
    }
    ds.transactions.insert(ds.transactions.end(), fm.flags.begin(), fm.flags.end());
    ds.labels.insert(ds.labels.end(), fm.labels.begin(), fm.labels.end());
    ds.provenance.emplace_back(fm.workload_id, fm.rows());
  }
  return ds;
}

// The full training-side preprocessing of a set of workload files.
inline MiningDataset build_mining_dataset(std::span<const WorkloadTrace> traces, const PreprocessConfig& cfg) {
  std::vector<FlagMatrix> kept;
  kept.reserve(traces.size());
  for (const auto& t : traces) kept.push_back(filter_instances(flag(t, cfg), cfg));
  return concatenate(kept);
}

}  // namespace drsam
