#pragma once

// Human-readable rule files.
//
//   # drsam rules v1
//   q: 8
//   schema: l1i_cache_misses,branch_mispredictions,...
//   min_support: 0.05
//   min_confidence: 0.9
//   phi_min: 5
//   phi_max: 8
//   source: Test Case 1 training split
//   rules: 2
//   {l1i_cache_misses, branch_mispredictions, ...} => ATTACK  support=0.45 confidence=1
//   ...
//
// Header keys appear exactly once each, in this order. Each rule line is
// `{` feature names joined by ", " `} => ATTACK  support=<x> confidence=<y>`
// with numbers in shortest round-trip form. Rules are listed in canonical
// order (antecedent size, then index sequence); the reader rejects anything
// else, so a file that loads is exactly what the writer would produce.

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "drsam/error.hpp"
#include "drsam/ingest.hpp"
#include "drsam/mining.hpp"
#include "drsam/numeric_text.hpp"

namespace drsam {

inline constexpr std::string_view kRuleFileMagic = "# drsam rules v1";

inline std::string describe_rule(const AssociationRule& rule, const FeatureSchema& schema) {
  std::string s = "{";
  bool first = true;
  for (auto j : rule.antecedent.items()) {
    if (!first) s += ", ";
    s += schema.name(j);
    first = false;
  }
  s += "} => ATTACK";
  return s;
}

inline void format_rules(std::ostream& out, const RuleSet& rs) {
  if (rs.source.find_first_of("\r\n") != std::string::npos) throw ValidationError("rule source must be a single line");
  out << kRuleFileMagic << '\n';
  out << "q: " << rs.q() << '\n';
  out << "schema: ";
  for (std::size_t j = 0; j < rs.q(); ++j) out << (j ? "," : "") << rs.schema.name(j);
  out << '\n';
  out << "min_support: " << format_double(rs.config.min_support) << '\n';
  out << "min_confidence: " << format_double(rs.config.min_confidence) << '\n';
  out << "phi_min: " << rs.config.min_antecedent_size << '\n';
  out << "phi_max: " << rs.config.max_antecedent_size << '\n';
  out << "source: " << rs.source << '\n';
  out << "rules: " << rs.rules.size() << '\n';
  for (const auto& r : rs.rules) {
    out << describe_rule(r, rs.schema) << "  support=" << format_double(r.support)
        << " confidence=" << format_double(r.confidence) << '\n';
  }
}

inline std::string rules_to_string(const RuleSet& rs) {
  std::ostringstream os;
  format_rules(os, rs);
  return os.str();
}

namespace detail {

inline std::string header_value(std::istream& in, std::string_view key, std::size_t& line_no) {
  std::string line;
  ++line_no;
  if (!getline_lf(in, line)) throw ParseError("rule file: missing '" + std::string(key) + "' line");
  const std::string prefix = std::string(key) + ": ";
  if (line.rfind(prefix, 0) != 0 && line != std::string(key) + ":") {
    throw ParseError("rule file line " + std::to_string(line_no) + ": expected '" + std::string(key) + ":'");
  }
  return line.size() > prefix.size() ? line.substr(prefix.size()) : std::string{};
}

inline std::uint64_t header_uint(std::istream& in, std::string_view key, std::size_t& line_no) {
  const auto v = parse_uint(header_value(in, key, line_no));
  if (!v) throw ParseError("rule file line " + std::to_string(line_no) + ": '" + std::string(key) + "' is not a count");
  return *v;
}

inline double header_double(std::istream& in, std::string_view key, std::size_t& line_no) {
  const auto v = parse_double(header_value(in, key, line_no));
  if (!v) throw ParseError("rule file line " + std::to_string(line_no) + ": '" + std::string(key) + "' is not a number");
  return *v;
}

}  // namespace detail

inline RuleSet parse_rules(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!detail::getline_lf(in, line) || line != kRuleFileMagic) throw ParseError("rule file: missing '# drsam rules v1' header");

  const auto q = detail::header_uint(in, "q", line_no);
  std::vector<std::string> names;
  {
    const auto schema_line = detail::header_value(in, "schema", line_no);
    for (auto cell : detail::split_commas(schema_line)) names.emplace_back(cell);
  }
  if (names.size() != q) {
    throw ParseError("rule file: schema lists " + std::to_string(names.size()) + " features but q=" + std::to_string(q));
  }
  RuleSet rs{{}, {}, FeatureSchema(std::move(names)), {}};
  rs.config.min_support = detail::header_double(in, "min_support", line_no);
  rs.config.min_confidence = detail::header_double(in, "min_confidence", line_no);
  rs.config.min_antecedent_size = detail::header_uint(in, "phi_min", line_no);
  rs.config.max_antecedent_size = detail::header_uint(in, "phi_max", line_no);
  try {
    rs.config.validate(q);
  } catch (const ValidationError& e) {
    throw ParseError(std::string("rule file: ") + e.what());
  }
  rs.source = detail::header_value(in, "source", line_no);
  const auto n_rules = detail::header_uint(in, "rules", line_no);

  for (std::uint64_t k = 0; k < n_rules; ++k) {
    ++line_no;
    const std::string where = "rule file line " + std::to_string(line_no);
    if (!detail::getline_lf(in, line)) throw ParseError("rule file: expected " + std::to_string(n_rules) + " rules");
    const auto close = line.find("} => ATTACK  support=");
    if (line.empty() || line.front() != '{' || close == std::string::npos) throw ParseError(where + ": malformed rule");
    std::uint32_t bits = 0;
    std::string_view body = std::string_view(line).substr(1, close - 1);
    std::size_t start = 0;
    while (start <= body.size()) {
      auto end = body.find(", ", start);
      if (end == std::string_view::npos) end = body.size();
      const std::string name(body.substr(start, end - start));
      const auto j = rs.schema.index_of(name);
      if (j == rs.q()) throw ParseError(where + ": unknown feature '" + name + "'");
      if ((bits >> j) & 1U) throw ParseError(where + ": feature '" + name + "' repeated");
      bits |= std::uint32_t{1} << j;
      start = end + 2;
    }
    const std::string_view tail = std::string_view(line).substr(close + 21);
    const auto conf_pos = tail.find(" confidence=");
    if (conf_pos == std::string_view::npos) throw ParseError(where + ": missing confidence");
    const auto support = parse_double(tail.substr(0, conf_pos));
    const auto confidence = parse_double(tail.substr(conf_pos + 12));
    if (!support || !confidence) throw ParseError(where + ": malformed support/confidence");
    AssociationRule rule{ItemSet(bits), *support, *confidence};
    const auto size = rule.antecedent.size();
    if (size < rs.config.min_antecedent_size || size > rs.config.max_antecedent_size) {
      throw ParseError(where + ": antecedent size " + std::to_string(size) + " is outside [phi_min, phi_max]");
    }
    if (!(rule.support > rs.config.min_support && rule.confidence > rs.config.min_confidence &&
          rule.support <= 1.0 && rule.confidence <= 1.0)) {
      throw ParseError(where + ": support/confidence do not clear the recorded thresholds");
    }
    if (!rs.rules.empty() && !canonical_less(rs.rules.back().antecedent, rule.antecedent)) {
      throw ParseError(where + ": rules are duplicated or out of canonical order");
    }
    rs.rules.push_back(rule);
  }
  while (detail::getline_lf(in, line)) {
    if (!trim(line).empty()) throw ParseError("rule file: trailing content after the declared rules");
  }
  return rs;
}

inline void save_rules(const RuleSet& rs, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  format_rules(out, rs);
  detail::finish_write(out, path);
}

inline RuleSet load_rules(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return parse_rules(in);
}

// Loads and checks the file against the schema the caller is working with.
inline RuleSet load_rules(const std::filesystem::path& path, const FeatureSchema& expected) {
  auto rs = load_rules(path);
  if (rs.q() != expected.q()) {
    throw SchemaMismatch("rule file '" + path.string() + "' has q=" + std::to_string(rs.q()) +
                         " but the active schema has q=" + std::to_string(expected.q()));
  }
  if (!(rs.schema == expected)) {
    throw SchemaMismatch("rule file '" + path.string() + "' was mined under a different feature schema");
  }
  return rs;
}

}  // namespace drsam
