#pragma once

// Rule application. A row is predicted ATTACK when at least one rule's
// antecedent is entirely triggered in that row; every such rule is recorded.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "drsam/error.hpp"
#include "drsam/ingest.hpp"
#include "drsam/mining.hpp"
#include "drsam/trace.hpp"

namespace drsam {

struct Detection {
  std::vector<Label> predicted;
  std::vector<std::vector<std::size_t>> fired_rules;  // indices into RuleSet::rules

  std::size_t size() const noexcept { return predicted.size(); }
  friend bool operator==(const Detection&, const Detection&) = default;
};

inline Detection classify(const FlagMatrix& fm, const RuleSet& rs) {
  if (fm.q != rs.q()) {
    throw SchemaMismatch("flag matrix '" + fm.workload_id + "' has q=" + std::to_string(fm.q) +
                         " but the rule set has q=" + std::to_string(rs.q()));
  }
  Detection det;
  det.predicted.reserve(fm.rows());
  det.fired_rules.reserve(fm.rows());
  for (const auto row : fm.flags) {
    std::vector<std::size_t> fired;
    for (std::size_t r = 0; r < rs.rules.size(); ++r) {
      if (rs.rules[r].antecedent.subset_of(row)) fired.push_back(r);
    }
    det.predicted.push_back(fired.empty() ? 0 : 1);
    det.fired_rules.push_back(std::move(fired));
  }
  return det;
}

// Columns: row, predicted, label, fired_rules (';'-joined). `labels` may be
// empty when ground truth is unknown, leaving the label column blank.
inline void format_detection(std::ostream& out, const Detection& det, const std::vector<Label>& labels) {
  if (!labels.empty() && labels.size() != det.size()) throw ValidationError("detection and labels differ in length");
  out << "row,predicted,label,fired_rules\n";
  for (std::size_t i = 0; i < det.size(); ++i) {
    out << i << ',' << static_cast<int>(det.predicted[i]) << ',';
    if (!labels.empty()) out << static_cast<int>(labels[i]);
    out << ',';
    for (std::size_t k = 0; k < det.fired_rules[i].size(); ++k) out << (k ? ";" : "") << det.fired_rules[i][k];
    out << '\n';
  }
}

inline void write_detection(const Detection& det, const std::vector<Label>& labels, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  format_detection(out, det, labels);
  detail::finish_write(out, path);
}

}  // namespace drsam
