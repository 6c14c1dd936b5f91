#pragma once

// CSV interchange for labeled traces, flag matrices and mining datasets.
//
// Trace files: a header line naming every schema feature exactly once plus a
// `label` column, in any order; then one line per sampling interval. Cells
// are plain numbers (integer, decimal or scientific), no quoting. Input may
// use LF or CRLF; output is always LF with columns in canonical schema order.

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "drsam/error.hpp"
#include "drsam/numeric_text.hpp"
#include "drsam/trace.hpp"

namespace drsam {

inline constexpr std::string_view kLabelColumn = "label";

struct TraceFileHeader {
  std::vector<std::string> column_names;
  std::string label_column{kLabelColumn};
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline bool getline_lf(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

inline Label parse_label(std::string_view cell, std::size_t row, const std::string& where) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw ParseError(where + ": label '" + std::string(cell) + "' at row " + std::to_string(row) +
                   " is outside {0,1}");
}

}  // namespace detail

// Resolves a header against the schema: result[k] is the schema column of
// file column k, or q for the label column.
inline std::vector<std::size_t> resolve_header(const TraceFileHeader& header, const FeatureSchema& schema,
                                               const std::string& where) {
  const auto q = schema.q();
  std::vector<std::size_t> mapping;
  std::vector<bool> seen(q, false);
  std::size_t label_hits = 0;
  for (const auto& name : header.column_names) {
    if (name == header.label_column) {
      ++label_hits;
      mapping.push_back(q);
      continue;
    }
    const auto j = schema.index_of(name);
    if (j == q) throw ParseError(where + ": unknown column '" + name + "'");
    if (seen[j]) throw ParseError(where + ": duplicate column '" + name + "'");
    seen[j] = true;
    mapping.push_back(j);
  }
  if (label_hits != 1) {
    throw ParseError(where + ": expected exactly one '" + header.label_column + "' column, found " +
                     std::to_string(label_hits));
  }
  for (std::size_t j = 0; j < q; ++j) {
    if (!seen[j]) throw ParseError(where + ": missing feature column '" + schema.name(j) + "'");
  }
  return mapping;
}

inline WorkloadTrace parse_trace(std::istream& in, std::string workload_id, const FeatureSchema& schema) {
  const std::string where = "trace '" + workload_id + "'";
  std::string line;
  if (!detail::getline_lf(in, line)) throw ParseError(where + ": missing header line");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  TraceFileHeader header;
  for (auto cell : detail::split_commas(line)) header.column_names.emplace_back(cell);
  const auto mapping = resolve_header(header, schema, where);
  const auto q = schema.q();

  WorkloadTrace trace;
  trace.workload_id = std::move(workload_id);
  std::size_t row = 0;
  while (detail::getline_lf(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != mapping.size()) {
      throw ParseError(where + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(mapping.size()));
    }
    std::vector<double> values(q, 0.0);
    Label label = 0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (mapping[k] == q) {
        label = detail::parse_label(cells[k], row, where);
        continue;
      }
      const auto v = parse_double(cells[k]);
      if (!v) {
        throw ParseError(where + ": non-numeric cell '" + std::string(cells[k]) + "' at row " +
                         std::to_string(row) + ", column '" + header.column_names[k] + "'");
      }
      values[mapping[k]] = *v;
    }
    trace.values.push_back(std::move(values));
    trace.labels.push_back(label);
    ++row;
  }
  validate_trace(trace, schema);
  return trace;
}

// workload_id is the file stem.
inline WorkloadTrace read_trace(const std::filesystem::path& path, const FeatureSchema& schema) {
  auto in = detail::open_in(path);
  return parse_trace(in, path.stem().string(), schema);
}

inline void format_trace(std::ostream& out, const WorkloadTrace& trace, const FeatureSchema& schema) {
  validate_trace(trace, schema);
  for (const auto& n : schema.names()) out << n << ',';
  out << kLabelColumn << '\n';
  for (std::size_t i = 0; i < trace.rows(); ++i) {
    for (double v : trace.values[i]) out << format_double(v) << ',';
    out << static_cast<int>(trace.labels[i]) << '\n';
  }
}

inline void write_trace(const WorkloadTrace& trace, const FeatureSchema& schema, const std::filesystem::path& path) {
  validate_trace(trace, schema);
  auto out = detail::open_out(path);
  format_trace(out, trace, schema);
  detail::finish_write(out, path);
}

// Flag matrix export: columns f0..f{q-1}, t, label.
inline void format_flag_matrix(std::ostream& out, const FlagMatrix& fm) {
  for (std::size_t j = 0; j < fm.q; ++j) out << 'f' << j << ',';
  out << "t," << kLabelColumn << '\n';
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    for (std::size_t j = 0; j < fm.q; ++j) out << (has_flag(fm.flags[i], j) ? '1' : '0') << ',';
    out << static_cast<int>(fm.triggered_counts[i]) << ',' << static_cast<int>(fm.labels[i]) << '\n';
  }
}

inline FlagMatrix parse_flag_matrix(std::istream& in, std::string workload_id) {
  const std::string where = "flag matrix '" + workload_id + "'";
  std::string line;
  if (!detail::getline_lf(in, line)) throw ParseError(where + ": missing header line");
  const auto header = detail::split_commas(line);
  if (header.size() < 3 || header[header.size() - 2] != "t" || header.back() != kLabelColumn) {
    throw ParseError(where + ": header must be f0..f{q-1},t,label");
  }
  const std::size_t q = header.size() - 2;
  if (q > kMaxFeatures) throw ParseError(where + ": too many feature columns");
  for (std::size_t j = 0; j < q; ++j) {
    if (header[j] != "f" + std::to_string(j)) throw ParseError(where + ": unexpected column '" + std::string(header[j]) + "'");
  }
  std::vector<FlagRow> rows;
  std::vector<Label> labels;
  std::size_t row = 0;
  while (detail::getline_lf(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != q + 2) throw ParseError(where + ": row " + std::to_string(row) + " has the wrong width");
    FlagRow r = 0;
    for (std::size_t j = 0; j < q; ++j) {
      if (cells[j] == "1") {
        r |= FlagRow{1} << j;
      } else if (cells[j] != "0") {
        throw ParseError(where + ": flag at row " + std::to_string(row) + " is not 0/1");
      }
    }
    const auto t = parse_uint(cells[q]);
    if (!t || *t != popcount(r)) {
      throw ParseError(where + ": triggered count at row " + std::to_string(row) + " disagrees with its flags");
    }
    rows.push_back(r);
    labels.push_back(detail::parse_label(cells[q + 1], row, where));
    ++row;
  }
  return FlagMatrix::from_rows(std::move(workload_id), q, std::move(rows), std::move(labels));
}

inline void write_flag_matrix(const FlagMatrix& fm, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  format_flag_matrix(out, fm);
  detail::finish_write(out, path);
}

inline FlagMatrix read_flag_matrix(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return parse_flag_matrix(in, path.stem().string());
}

// Mining dataset export: `#provenance,<id>,<rows>` lines, then the flag-matrix
// layout without the t column.
inline void format_mining_dataset(std::ostream& out, const MiningDataset& ds) {
  for (const auto& [id, n] : ds.provenance) out << "#provenance," << id << ',' << n << '\n';
  for (std::size_t j = 0; j < ds.q; ++j) out << 'f' << j << ',';
  out << kLabelColumn << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.q; ++j) out << (has_flag(ds.transactions[i], j) ? '1' : '0') << ',';
    out << static_cast<int>(ds.labels[i]) << '\n';
  }
}

inline MiningDataset parse_mining_dataset(std::istream& in) {
  MiningDataset ds;
  std::string line;
  while (true) {
    if (!detail::getline_lf(in, line)) throw ParseError("mining dataset: missing header line");
    if (line.rfind("#provenance,", 0) != 0) break;
    const std::string_view rest = std::string_view(line).substr(12);
    const auto comma = rest.rfind(',');
    const auto n = comma == std::string_view::npos ? std::nullopt : parse_uint(rest.substr(comma + 1));
    if (!n) throw ParseError("mining dataset: malformed provenance line '" + line + "'");
    ds.provenance.emplace_back(std::string(rest.substr(0, comma)), static_cast<std::size_t>(*n));
  }
  const auto header = detail::split_commas(line);
  if (header.size() < 2 || header.back() != kLabelColumn) throw ParseError("mining dataset: header must end in label");
  ds.q = header.size() - 1;
  if (ds.q > kMaxFeatures) throw ParseError("mining dataset: too many feature columns");
  std::size_t row = 0;
  while (detail::getline_lf(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != ds.q + 1) throw ParseError("mining dataset: row " + std::to_string(row) + " has the wrong width");
    FlagRow r = 0;
    for (std::size_t j = 0; j < ds.q; ++j) {
      if (cells[j] == "1") {
        r |= FlagRow{1} << j;
      } else if (cells[j] != "0") {
        throw ParseError("mining dataset: item at row " + std::to_string(row) + " is not 0/1");
      }
    }
    ds.transactions.push_back(r);
    ds.labels.push_back(detail::parse_label(cells[ds.q], row, "mining dataset"));
    ++row;
  }
  std::size_t total = 0;
  for (const auto& p : ds.provenance) total += p.second;
  if (total != ds.size()) throw ParseError("mining dataset: provenance counts do not sum to the row count");
  return ds;
}

}  // namespace drsam
