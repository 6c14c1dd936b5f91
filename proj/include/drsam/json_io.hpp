#pragma once

// JSON views of configurations and reports (manifests, synth configs, CLI
// reports). Field names follow the C++ member names.

#include <string>

#include "json.hpp"

#include "drsam/error.hpp"
#include "drsam/eval.hpp"
#include "drsam/mining.hpp"
#include "drsam/preprocess.hpp"
#include "drsam/synth.hpp"

namespace drsam {

using json = nlohmann::ordered_json;

inline std::string to_string(FlagRule r) { return r == FlagRule::MeanPlusKSigma ? "mean-plus" : "absolute"; }
inline std::string to_string(TriggerThreshold t) {
  return t == TriggerThreshold::AtLeastQMinus3 ? "at-least" : "strict";
}

inline FlagRule parse_flag_rule(const std::string& s) {
  if (s == "mean-plus") return FlagRule::MeanPlusKSigma;
  if (s == "absolute") return FlagRule::KSigmaAbsolute;
  throw ValidationError("unknown flag rule '" + s + "' (expected mean-plus or absolute)");
}

inline TriggerThreshold parse_trigger_threshold(const std::string& s) {
  if (s == "at-least") return TriggerThreshold::AtLeastQMinus3;
  if (s == "strict") return TriggerThreshold::StrictlyGreaterQMinus3;
  throw ValidationError("unknown trigger threshold '" + s + "' (expected at-least or strict)");
}

inline json to_json(const PreprocessConfig& c) {
  return {{"sigma_multiplier", c.sigma_multiplier},
          {"flag_rule", to_string(c.flag_rule)},
          {"trigger_threshold", to_string(c.trigger_threshold)}};
}

inline json to_json(const MiningConfig& c) {
  return {{"min_support", c.min_support},
          {"min_confidence", c.min_confidence},
          {"min_antecedent_size", c.min_antecedent_size},
          {"max_antecedent_size", c.max_antecedent_size}};
}

inline json to_json(const SynthConfig& c) {
  return {{"seed", c.seed},
          {"q", c.q},
          {"workload_id", c.workload_id},
          {"n_benign", c.n_benign},
          {"n_attack", c.n_attack},
          {"n_transient", c.n_transient},
          {"attack_windows", c.attack_windows},
          {"benign_base_mean", c.benign_base_mean},
          {"benign_base_std", c.benign_base_std},
          {"attack_shift", c.attack_shift},
          {"return_variant_fetch_stall_shift", c.return_variant_fetch_stall_shift},
          {"fetch_stall_feature", c.fetch_stall_feature},
          {"stress_trigger_prob", c.stress_trigger_prob},
          {"stress_shift", c.stress_shift},
          {"transient_min", c.transient_min},
          {"transient_max", c.transient_max},
          {"attack_trace_benign", c.attack_trace_benign},
          {"benchmark_rows", c.benchmark_rows},
          {"benchmark_attack_fraction", c.benchmark_attack_fraction}};
}

// Missing keys keep their defaults; unknown keys are rejected.
inline SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  if (!j.is_object()) throw ValidationError("synth config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "q") c.q = v.get<std::size_t>();
      else if (key == "workload_id") c.workload_id = v.get<std::string>();
      else if (key == "n_benign") c.n_benign = v.get<std::size_t>();
      else if (key == "n_attack") c.n_attack = v.get<std::size_t>();
      else if (key == "n_transient") c.n_transient = v.get<std::size_t>();
      else if (key == "attack_windows") c.attack_windows = v.get<std::size_t>();
      else if (key == "benign_base_mean") c.benign_base_mean = v.get<std::vector<double>>();
      else if (key == "benign_base_std") c.benign_base_std = v.get<std::vector<double>>();
      else if (key == "attack_shift") c.attack_shift = v.get<std::vector<double>>();
      else if (key == "return_variant_fetch_stall_shift") c.return_variant_fetch_stall_shift = v.get<double>();
      else if (key == "fetch_stall_feature") c.fetch_stall_feature = v.get<std::size_t>();
      else if (key == "stress_trigger_prob") c.stress_trigger_prob = v.get<double>();
      else if (key == "stress_shift") c.stress_shift = v.get<double>();
      else if (key == "transient_min") c.transient_min = v.get<std::size_t>();
      else if (key == "transient_max") c.transient_max = v.get<std::size_t>();
      else if (key == "attack_trace_benign") c.attack_trace_benign = v.get<std::size_t>();
      else if (key == "benchmark_rows") c.benchmark_rows = v.get<std::size_t>();
      else if (key == "benchmark_attack_fraction") c.benchmark_attack_fraction = v.get<double>();
      else throw ValidationError("synth config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Timing fields are the only non-deterministic part of a report.
inline json to_json(const EvalReport& r, bool include_timing = true) {
  json j{{"test_case_id", r.test_case_id}, {"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}};
  if (r.scored()) {
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
  } else {
    j["accuracy"] = j["precision"] = j["recall"] = j["f1"] = nullptr;
  }
  if (include_timing) {
    j["spp_time_per_1k"] = optional_json(r.spp_time_per_1k);
    j["test_time_per_1k"] = optional_json(r.test_time_per_1k);
    j["rg_time_per_1k"] = optional_json(r.rg_time_per_1k);
  }
  j["split_seed"] = r.split_seed ? json(*r.split_seed) : json(nullptr);
  return j;
}

}  // namespace drsam
