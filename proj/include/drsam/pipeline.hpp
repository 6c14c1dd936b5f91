#pragma once

// End-to-end commands behind the `drsam` CLI. Every command writes its data
// files under `out_dir` together with `<command>.manifest.json`, which
// records every input and setting needed to reproduce them. Apart from the
// timing fields of reports, outputs are a pure function of the manifest.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "drsam/detector.hpp"
#include "drsam/eval.hpp"
#include "drsam/ingest.hpp"
#include "drsam/json_io.hpp"
#include "drsam/mining.hpp"
#include "drsam/preprocess.hpp"
#include "drsam/rule_file.hpp"
#include "drsam/synth.hpp"

namespace drsam::pipeline {

namespace fs = std::filesystem;

struct RunManifest {
  RunManifest(std::string cmd, fs::path dir, std::vector<fs::path> in = {})
      : command(std::move(cmd)), out_dir(std::move(dir)), inputs(std::move(in)) {}

  std::string command;
  fs::path out_dir;
  std::vector<fs::path> inputs;
  std::optional<fs::path> rules;
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<PreprocessConfig> preprocess;
  std::optional<MiningConfig> mining;
  std::optional<SynthConfig> synth;
  json extra = json::object();
  std::vector<fs::path> outputs;  // relative to out_dir

  json to_json() const {
    json j{{"command", command}, {"out_dir", out_dir.generic_string()}};
    j["inputs"] = json::array();
    for (const auto& p : inputs) j["inputs"].push_back(p.generic_string());
    j["rules"] = rules ? json(rules->generic_string()) : json(nullptr);
    j["config"] = config ? json(config->generic_string()) : json(nullptr);
    j["seed"] = seed ? json(*seed) : json(nullptr);
    if (preprocess) j["preprocess"] = drsam::to_json(*preprocess);
    if (mining) j["mining"] = drsam::to_json(*mining);
    if (synth) j["synth"] = drsam::to_json(*synth);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["outputs"] = json::array();
    for (const auto& p : outputs) j["outputs"].push_back(p.generic_string());
    return j;
  }
};

inline void write_text(const fs::path& path, const std::string& text) {
  auto out = detail::open_out(path);
  out << text;
  detail::finish_write(out, path);
}

inline void write_manifest(const RunManifest& m) {
  write_text(m.out_dir / (m.command + ".manifest.json"), m.to_json().dump(2) + "\n");
}

inline std::vector<WorkloadTrace> read_traces(const std::vector<fs::path>& inputs, const FeatureSchema& schema) {
  if (inputs.empty()) throw ValidationError("no input traces given");
  std::vector<WorkloadTrace> traces;
  for (const auto& p : inputs) traces.push_back(read_trace(p, schema));
  return traces;
}

// ---- synth ---------------------------------------------------------------

struct SynthCommand {
  fs::path out_dir;
  SynthConfig synth;
  std::optional<fs::path> config_path;
  std::vector<int> test_cases{1, 2, 3, 4};
};

// Writes <out_dir>/tc<N>/<workload>.csv for each requested test case.
inline std::vector<fs::path> cmd_synth(const SynthCommand& cmd) {
  const auto schema = FeatureSchema::standard();
  if (cmd.synth.q != schema.q()) throw SchemaMismatch("synthetic traces must use the standard q=8 schema");
  RunManifest m{"synth", cmd.out_dir};
  m.config = cmd.config_path;
  m.seed = cmd.synth.seed;
  m.synth = cmd.synth;
  m.extra["test_cases"] = cmd.test_cases;
  std::vector<fs::path> written;
  for (int tc : cmd.test_cases) {
    for (const auto& t : generate_test_case(tc, cmd.synth)) {
      const fs::path rel = fs::path("tc" + std::to_string(tc)) / (t.workload_id + ".csv");
      write_trace(t, schema, cmd.out_dir / rel);
      m.outputs.push_back(rel);
      written.push_back(cmd.out_dir / rel);
    }
  }
  write_manifest(m);
  return written;
}

// ---- preprocess ----------------------------------------------------------

struct PreprocessCommand {
  fs::path out_dir;
  std::vector<fs::path> inputs;
  PreprocessConfig preprocess;
  bool train = false;  // also filter and write the concatenated mining dataset
};

// Writes <stem>.flags.csv per input (filtered when training) and, when
// training, dataset.csv.
inline void cmd_preprocess(const PreprocessCommand& cmd) {
  cmd.preprocess.validate();
  const auto schema = FeatureSchema::standard();
  const auto traces = read_traces(cmd.inputs, schema);
  RunManifest m{"preprocess", cmd.out_dir, cmd.inputs};
  m.preprocess = cmd.preprocess;
  m.extra["train"] = cmd.train;
  std::vector<FlagMatrix> kept;
  for (const auto& t : traces) {
    auto fm = flag(t, compute_stats(t), cmd.preprocess);
    if (cmd.train) fm = filter_instances(fm, cmd.preprocess);
    const fs::path rel = t.workload_id + ".flags.csv";
    write_flag_matrix(fm, cmd.out_dir / rel);
    m.outputs.push_back(rel);
    kept.push_back(std::move(fm));
  }
  if (cmd.train) {
    std::ostringstream os;
    format_mining_dataset(os, concatenate(kept));
    write_text(cmd.out_dir / "dataset.csv", os.str());
    m.outputs.emplace_back("dataset.csv");
  }
  write_manifest(m);
}

// ---- mine ----------------------------------------------------------------

struct MineCommand {
  fs::path out_dir;
  std::vector<fs::path> inputs;
  PreprocessConfig preprocess;
  MiningConfig mining;
  std::string source = "training traces";
  std::string rules_name = "rules.txt";
};

inline RuleGeneration cmd_mine(const MineCommand& cmd) {
  const auto schema = FeatureSchema::standard();
  cmd.preprocess.validate();
  cmd.mining.validate(schema.q());
  const auto traces = read_traces(cmd.inputs, schema);
  auto gen = generate_rule_set(traces, schema, cmd.preprocess, cmd.mining, cmd.source);
  save_rules(gen.rules, cmd.out_dir / cmd.rules_name);
  write_text(cmd.out_dir / "rg_report.json", to_json(gen.timing).dump(2) + "\n");
  RunManifest m{"mine", cmd.out_dir, cmd.inputs};
  m.preprocess = cmd.preprocess;
  m.mining = cmd.mining;
  m.extra["source"] = cmd.source;
  m.extra["mining_rows"] = gen.mining_rows;
  m.outputs = {cmd.rules_name, "rg_report.json"};
  write_manifest(m);
  return gen;
}

// ---- detect --------------------------------------------------------------

struct DetectCommand {
  fs::path out_dir;
  fs::path rules_path;
  std::vector<fs::path> inputs;
  PreprocessConfig preprocess;
};

// Writes <stem>.detections.csv per input.
inline void cmd_detect(const DetectCommand& cmd) {
  cmd.preprocess.validate();
  const auto schema = FeatureSchema::standard();
  const auto rules = load_rules(cmd.rules_path, schema);
  const auto traces = read_traces(cmd.inputs, schema);
  RunManifest m{"detect", cmd.out_dir, cmd.inputs};
  m.rules = cmd.rules_path;
  m.preprocess = cmd.preprocess;
  for (const auto& t : traces) {
    const auto det = classify(flag(t, compute_stats(t), cmd.preprocess), rules);
    const fs::path rel = t.workload_id + ".detections.csv";
    write_detection(det, t.labels, cmd.out_dir / rel);
    m.outputs.push_back(rel);
  }
  write_manifest(m);
}

// ---- eval ----------------------------------------------------------------

struct EvalCommand {
  fs::path out_dir;
  fs::path rules_path;
  std::vector<fs::path> inputs;
  std::string test_case_id = "Test Case";
  PreprocessConfig preprocess;
};

inline void write_reports(const fs::path& out_dir, const std::string& stem, std::span<const EvalReport> reports,
                          RunManifest& m) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  const auto table = compare_report(reports);
  write_text(out_dir / (stem + ".json"), arr.dump(2) + "\n");
  write_text(out_dir / (stem + ".txt"), table.text);
  write_text(out_dir / (stem + ".csv"), table.csv);
  m.outputs.push_back(stem + ".json");
  m.outputs.push_back(stem + ".txt");
  m.outputs.push_back(stem + ".csv");
}

inline EvalReport cmd_eval(const EvalCommand& cmd) {
  cmd.preprocess.validate();
  const auto rules = load_rules(cmd.rules_path, FeatureSchema::standard());
  const auto report = run_test_case({cmd.test_case_id, cmd.inputs}, rules, cmd.preprocess);
  RunManifest m{"eval", cmd.out_dir, cmd.inputs};
  m.rules = cmd.rules_path;
  m.preprocess = cmd.preprocess;
  m.extra["test_case_id"] = cmd.test_case_id;
  write_reports(cmd.out_dir, "report", std::span<const EvalReport>(&report, 1), m);
  write_manifest(m);
  return report;
}

// ---- repro ---------------------------------------------------------------

// Defaults of the reproduction run. Flagging uses the absolute k*sigma rule:
// with per-file statistics the mean+k*sigma rule can flag at most 1/(1+k^2)
// of a file's rows per feature (Cantelli), which rules out detecting the
// attack half of a class-balanced Test Case 1.
inline PreprocessConfig repro_preprocess_defaults() {
  PreprocessConfig c;
  c.flag_rule = FlagRule::KSigmaAbsolute;
  return c;
}

struct ReproCommand {
  fs::path out_dir;
  SynthConfig synth;
  std::optional<fs::path> config_path;
  PreprocessConfig preprocess = repro_preprocess_defaults();
  MiningConfig mining;
  std::uint64_t split_seed = 1;
  double train_fraction = 0.7;
};

struct ReproResult {
  RuleSet rules;
  std::vector<EvalReport> reports;  // "RG", then Test Case 1..4
  std::size_t mining_rows = 0;
};

// Synthesizes all four test cases, mines rules on the 70% split of Test
// Case 1 and scores every test case with those rules only.
inline ReproResult cmd_repro(const ReproCommand& cmd) {
  const auto schema = FeatureSchema::standard();
  cmd.preprocess.validate();
  cmd.mining.validate(schema.q());
  cmd.synth.validate();

  RunManifest m{"repro", cmd.out_dir};
  m.config = cmd.config_path;
  m.seed = cmd.synth.seed;
  m.preprocess = cmd.preprocess;
  m.mining = cmd.mining;
  m.synth = cmd.synth;
  m.extra["split_seed"] = cmd.split_seed;
  m.extra["train_fraction"] = cmd.train_fraction;

  std::vector<std::vector<WorkloadTrace>> cases;
  for (int tc = 1; tc <= 4; ++tc) {
    cases.push_back(generate_test_case(tc, cmd.synth));
    for (const auto& t : cases.back()) {
      const fs::path rel = fs::path("traces") / ("tc" + std::to_string(tc)) / (t.workload_id + ".csv");
      write_trace(t, schema, cmd.out_dir / rel);
      m.outputs.push_back(rel);
    }
  }

  std::vector<WorkloadTrace> train, holdout;
  for (const auto& t : cases[0]) {
    auto s = split_trace(t, cmd.train_fraction, cmd.split_seed);
    for (auto* part : {&s.train, &s.test}) {
      const fs::path rel = fs::path("traces") / "tc1" / (part == &s.train ? "train" : "test") / (t.workload_id + ".csv");
      write_trace(*part, schema, cmd.out_dir / rel);
      m.outputs.push_back(rel);
    }
    train.push_back(std::move(s.train));
    holdout.push_back(std::move(s.test));
  }

  auto gen = generate_rule_set(train, schema, cmd.preprocess, cmd.mining, "Test Case 1 training split");
  save_rules(gen.rules, cmd.out_dir / "rules.txt");
  m.outputs.emplace_back("rules.txt");

  ReproResult result{gen.rules, {gen.timing}, gen.mining_rows};
  result.reports.front().split_seed = cmd.split_seed;
  for (int tc = 1; tc <= 4; ++tc) {
    const auto& traces = tc == 1 ? holdout : cases[static_cast<std::size_t>(tc - 1)];
    auto run = run_traces("Test Case " + std::to_string(tc), traces, gen.rules, cmd.preprocess);
    if (tc == 1) run.report.split_seed = cmd.split_seed;
    for (std::size_t k = 0; k < traces.size(); ++k) {
      const fs::path rel = fs::path("detections") / ("tc" + std::to_string(tc)) / (traces[k].workload_id + ".csv");
      write_detection(run.detections[k], traces[k].labels, cmd.out_dir / rel);
      m.outputs.push_back(rel);
    }
    result.reports.push_back(std::move(run.report));
  }
  m.extra["mining_rows"] = gen.mining_rows;
  m.extra["rule_count"] = gen.rules.rules.size();
  write_reports(cmd.out_dir, "comparison", result.reports, m);
  write_manifest(m);
  return result;
}

}  // namespace drsam::pipeline
