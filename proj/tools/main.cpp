// drsam: command-line front end for the detection pipeline.
//
//   drsam synth      --out-dir D [--tc N]... [--seed S] [--config synth.json]
//   drsam preprocess --out-dir D --inputs a.csv b.csv [--train]
//   drsam mine       --out-dir D --inputs a.csv b.csv [--min-support ...]
//   drsam detect     --out-dir D --rules rules.txt --inputs t.csv
//   drsam eval       --out-dir D --rules rules.txt --inputs t.csv [--test-case-id ID]
//   drsam repro      --out-dir D [--seed S] [--split-seed S]

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "drsam/pipeline.hpp"

namespace {

using namespace drsam;
namespace fs = std::filesystem;

struct PreprocessFlags {
  double sigma = 3.0;
  std::string flag_rule = "mean-plus";
  std::string trigger = "at-least";

  void attach(CLI::App* app) {
    app->add_option("--sigma", sigma, "sigma multiplier of the flag rule")->capture_default_str();
    app->add_option("--flag-rule", flag_rule, "mean-plus (x > mean + k*sigma) or absolute (x > k*sigma)")
        ->capture_default_str();
    app->add_option("--trigger", trigger, "attack-row filter: at-least (t >= q-3) or strict (t > q-3)")
        ->capture_default_str();
  }

  PreprocessConfig config() const {
    PreprocessConfig c;
    c.sigma_multiplier = sigma;
    c.flag_rule = parse_flag_rule(flag_rule);
    c.trigger_threshold = parse_trigger_threshold(trigger);
    c.validate();
    return c;
  }
};

struct MiningFlags {
  MiningConfig cfg = MiningConfig::for_features(FeatureSchema::standard().q());

  void attach(CLI::App* app) {
    app->add_option("--min-support", cfg.min_support, "support threshold (fraction)")->capture_default_str();
    app->add_option("--min-confidence", cfg.min_confidence, "confidence threshold (fraction)")->capture_default_str();
    app->add_option("--phi-min", cfg.min_antecedent_size, "smallest rule antecedent")->capture_default_str();
    app->add_option("--phi-max", cfg.max_antecedent_size, "largest rule antecedent")->capture_default_str();
  }
};

SynthConfig load_synth_config(const std::optional<fs::path>& path) {
  if (!path) return {};
  std::ifstream in(*path);
  if (!in) throw IoError("cannot open synth config '" + path->string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("synth config '" + path->string() + "': " + e.what());
  }
  return synth_config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical preprocessing + association rule mining detector for flush+fault attacks"};
  app.require_subcommand(1);

  fs::path out_dir;
  std::vector<fs::path> inputs;
  fs::path rules_path;
  std::optional<fs::path> config_path;
  std::optional<std::uint64_t> seed;
  PreprocessFlags pre;
  MiningFlags mine;

  auto* synth = app.add_subcommand("synth", "generate synthetic labeled traces for test cases 1-4");
  std::vector<int> tcs{1, 2, 3, 4};
  synth->add_option("--out-dir", out_dir)->required();
  synth->add_option("--tc", tcs, "test case ids to generate")->check(CLI::Range(1, 4));
  synth->add_option("--seed", seed);
  synth->add_option("--config", config_path, "synth config JSON");

  auto* preprocess = app.add_subcommand("preprocess", "flag traces (and filter with --train)");
  bool train = false;
  preprocess->add_option("--out-dir", out_dir)->required();
  preprocess->add_option("--inputs", inputs)->required();
  preprocess->add_flag("--train", train, "filter attack rows and write the mining dataset");
  pre.attach(preprocess);

  auto* mine_cmd = app.add_subcommand("mine", "mine association rules from training traces");
  std::string source = "training traces";
  mine_cmd->add_option("--out-dir", out_dir)->required();
  mine_cmd->add_option("--inputs", inputs)->required();
  mine_cmd->add_option("--source", source, "provenance text stored in the rule file")->capture_default_str();
  pre.attach(mine_cmd);
  mine.attach(mine_cmd);

  auto* detect = app.add_subcommand("detect", "classify every row of traces with a rule file");
  detect->add_option("--out-dir", out_dir)->required();
  detect->add_option("--rules", rules_path)->required();
  detect->add_option("--inputs", inputs)->required();
  pre.attach(detect);

  auto* eval = app.add_subcommand("eval", "score a rule file on one test case");
  std::string tc_id = "Test Case";
  eval->add_option("--out-dir", out_dir)->required();
  eval->add_option("--rules", rules_path)->required();
  eval->add_option("--inputs", inputs)->required();
  eval->add_option("--test-case-id", tc_id)->capture_default_str();
  pre.attach(eval);

  auto* repro = app.add_subcommand("repro", "synthetic four-test-case reproduction with Test Case 1 rules");
  std::uint64_t split_seed = 1;
  double train_fraction = 0.7;
  bool quiet = false;
  repro->add_option("--out-dir", out_dir)->required();
  repro->add_option("--seed", seed);
  repro->add_option("--config", config_path, "synth config JSON");
  repro->add_option("--split-seed", split_seed)->capture_default_str();
  repro->add_option("--train-fraction", train_fraction)->capture_default_str();
  repro->add_flag("--quiet", quiet, "do not print the comparison table");
  PreprocessFlags repro_pre;
  repro_pre.flag_rule = "absolute";
  repro_pre.attach(repro);
  mine.attach(repro);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      pipeline::SynthCommand cmd{out_dir, load_synth_config(config_path), config_path, tcs};
      if (seed) cmd.synth.seed = *seed;
      pipeline::cmd_synth(cmd);
    } else if (preprocess->parsed()) {
      pipeline::cmd_preprocess({out_dir, inputs, pre.config(), train});
    } else if (mine_cmd->parsed()) {
      pipeline::cmd_mine({out_dir, inputs, pre.config(), mine.cfg, source});
    } else if (detect->parsed()) {
      pipeline::cmd_detect({out_dir, rules_path, inputs, pre.config()});
    } else if (eval->parsed()) {
      pipeline::cmd_eval({out_dir, rules_path, inputs, tc_id, pre.config()});
    } else if (repro->parsed()) {
      pipeline::ReproCommand cmd{out_dir, load_synth_config(config_path), config_path, repro_pre.config(), mine.cfg,
                                 split_seed, train_fraction};
      if (seed) cmd.synth.seed = *seed;
      const auto result = pipeline::cmd_repro(cmd);
      if (!quiet) std::cout << compare_report(result.reports).text;
    }
  } catch (const drsam::Error& e) {
    std::cerr << "drsam: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "drsam: unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
