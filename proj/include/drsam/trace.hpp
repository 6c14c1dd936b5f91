#pragma once

// Core domain types shared by every pipeline stage.
//
// Counter matrices are column-aligned to a FeatureSchema at ingestion, so
// everything downstream addresses a feature by its column index. The model
// is agnostic to the sampling interval at which counters were dumped; mixing
// traces of different sampling granularity is the caller's responsibility.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "drsam/error.hpp"

namespace drsam {

// Transactions carry the q feature items plus one ATTACK item in a 32-bit
// mask, which caps the schema width.
inline constexpr std::size_t kMaxFeatures = 31;

class FeatureSchema {
 public:
  explicit FeatureSchema(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ValidationError("feature schema must name at least one feature");
    if (names_.size() > kMaxFeatures) {
      throw ValidationError("feature schema has " + std::to_string(names_.size()) +
                            " features; at most " + std::to_string(kMaxFeatures) + " are supported");
    }
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (n.empty()) throw ValidationError("feature names must be non-empty");
      if (n.find_first_of(",{}\r\n") != std::string::npos) {
        throw ValidationError("feature name '" + n + "' contains a reserved character");
      }
      if (!seen.insert(n).second) throw ValidationError("duplicate feature name '" + n + "'");
    }
  }

  // The eight correlated counters of the flush+fault detector, canonical order.
  static FeatureSchema standard() {
    return FeatureSchema({"l1i_cache_misses", "branch_mispredictions", "incorrect_conditional_branches",
                          "total_executed_branches", "fetch_stalls", "tlb_accesses",
                          "total_load_instructions", "total_store_instructions"});
  }

  std::size_t q() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t j) const { return names_.at(j); }

  // Column index of `name`, or q() when absent.
  std::size_t index_of(const std::string& name) const noexcept {
    for (std::size_t j = 0; j < names_.size(); ++j) {
      if (names_[j] == name) return j;
    }
    return names_.size();
  }

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<std::string> names_;
};

using Label = std::uint8_t;  // 1 = attack interval, 0 = benign

struct WorkloadTrace {
  std::string workload_id;
  std::vector<std::vector<double>> values;  // p_m rows of q counter readings
  std::vector<Label> labels;                // one per row

  std::size_t rows() const noexcept { return values.size(); }
  std::size_t attack_count() const noexcept {
    std::size_t n = 0;
    for (auto l : labels) n += l;
    return n;
  }

  friend bool operator==(const WorkloadTrace&, const WorkloadTrace&) = default;
};

// Returns the trace unchanged if every invariant holds against `schema`;
// otherwise throws ValidationError citing the offending row (and column).
inline const WorkloadTrace& validate_trace(const WorkloadTrace& trace, const FeatureSchema& schema) {
  const auto q = schema.q();
  const std::string where = trace.workload_id.empty() ? "trace" : "trace '" + trace.workload_id + "'";
  if (trace.values.empty()) throw ValidationError(where + " has no rows");
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    const auto& row = trace.values[i];
    if (row.size() != q) {
      throw ValidationError(where + ": row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                            " values, schema expects " + std::to_string(q));
    }
  }
  if (trace.labels.size() != trace.values.size()) {
    throw ValidationError(where + ": label vector has length " + std::to_string(trace.labels.size()) +
                          " but there are " + std::to_string(trace.values.size()) + " rows");
  }
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      const double v = trace.values[i][j];
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(where + ": value at (" + std::to_string(i) + "," + std::to_string(j) +
                              ") must be finite and non-negative");
      }
    }
    if (trace.labels[i] > 1) {
      throw ValidationError(where + ": label at row " + std::to_string(i) + " is outside {0,1}");
    }
  }
  return trace;
}

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation

  std::size_t q() const noexcept { return mean.size(); }
  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

// Set of triggered features of one sampling interval; bit j is feature j.
using FlagRow = std::uint32_t;

inline bool has_flag(FlagRow row, std::size_t feature) noexcept { return (row >> feature) & 1U; }
inline std::uint8_t popcount(FlagRow row) noexcept { return static_cast<std::uint8_t>(std::popcount(row)); }

inline FlagRow make_flag_row(std::initializer_list<std::size_t> features) {
  FlagRow r = 0;
  for (auto f : features) r |= FlagRow{1} << f;
  return r;
}

struct FlagMatrix {
  std::string workload_id;
  std::size_t q = 0;
  std::vector<FlagRow> flags;
  std::vector<std::uint8_t> triggered_counts;
  std::vector<Label> labels;

  std::size_t rows() const noexcept { return flags.size(); }
  bool flag(std::size_t i, std::size_t j) const { return has_flag(flags.at(i), j); }

  // Builds a matrix from row masks, deriving the triggered counts.
  static FlagMatrix from_rows(std::string id, std::size_t q, std::vector<FlagRow> rows, std::vector<Label> labels) {
    if (rows.size() != labels.size()) throw ValidationError("flag rows and labels differ in length");
    FlagMatrix fm{std::move(id), q, std::move(rows), {}, std::move(labels)};
    const FlagRow allowed = q >= 32 ? ~FlagRow{0} : (FlagRow{1} << q) - 1;
    fm.triggered_counts.reserve(fm.flags.size());
    for (std::size_t i = 0; i < fm.flags.size(); ++i) {
      if (fm.flags[i] & ~allowed) {
        throw ValidationError("flag row " + std::to_string(i) + " sets a bit beyond q=" + std::to_string(q));
      }
      fm.triggered_counts.push_back(popcount(fm.flags[i]));
    }
    return fm;
  }

  friend bool operator==(const FlagMatrix&, const FlagMatrix&) = default;
};

struct MiningDataset {
  std::size_t q = 0;
  std::vector<FlagRow> transactions;  // feature items only; the label lives in `labels`
  std::vector<Label> labels;
  std::vector<std::pair<std::string, std::size_t>> provenance;  // (workload_id, retained rows)

  std::size_t size() const noexcept { return transactions.size(); }
  friend bool operator==(const MiningDataset&, const MiningDataset&) = default;
};

}  // namespace drsam
