#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "drsam/pipeline.hpp"

using namespace drsam;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "drsam_pipeline_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Run {
  int code;
  std::string err;
};

Run cli(const std::string& args, const fs::path& scratch) {
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + DRSAM_CLI + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {status, slurp(err)};
}

SynthConfig small_synth() {
  SynthConfig c;
  c.n_benign = 1500;
  c.n_attack = 1400;
  c.n_transient = 40;
  c.attack_trace_benign = 60;
  c.benchmark_rows = 3000;
  return c;
}

}  // namespace

TEST(Pipeline, StagesWriteOutputsAndManifests) {
  const auto dir = fresh_dir("stages");
  const auto written = pipeline::cmd_synth({dir / "traces", small_synth(), std::nullopt, {1, 3}});
  ASSERT_EQ(written.size(), 5u);
  EXPECT_TRUE(fs::exists(dir / "traces" / "tc1" / "os.csv"));
  EXPECT_TRUE(fs::exists(dir / "traces" / "tc3" / "miniz.csv"));
  EXPECT_TRUE(fs::exists(dir / "traces" / "synth.manifest.json"));

  PreprocessConfig pre;
  pre.flag_rule = FlagRule::KSigmaAbsolute;
  const std::vector<fs::path> tc1{dir / "traces" / "tc1" / "os.csv", dir / "traces" / "tc1" / "fault.csv"};
  pipeline::cmd_preprocess({dir / "pre", tc1, pre, true});
  EXPECT_TRUE(fs::exists(dir / "pre" / "os.flags.csv"));
  EXPECT_TRUE(fs::exists(dir / "pre" / "fault.flags.csv"));
  EXPECT_TRUE(fs::exists(dir / "pre" / "dataset.csv"));
  const auto manifest = json::parse(slurp(dir / "pre" / "preprocess.manifest.json"));
  EXPECT_EQ(manifest["command"], "preprocess");
  EXPECT_EQ(manifest["train"], true);
  EXPECT_EQ(manifest["preprocess"]["flag_rule"], "absolute");
  EXPECT_EQ(manifest["outputs"].size(), 3u);

  const auto gen = pipeline::cmd_mine({dir / "mine", tc1, pre, MiningConfig::for_features(8), "unit", "rules.txt"});
  EXPECT_FALSE(gen.rules.rules.empty());
  EXPECT_EQ(load_rules(dir / "mine" / "rules.txt"), gen.rules);
  EXPECT_TRUE(fs::exists(dir / "mine" / "rg_report.json"));
  EXPECT_TRUE(fs::exists(dir / "mine" / "mine.manifest.json"));

  std::vector<fs::path> tc3;
  for (const auto& name : {"qsort", "prime", "miniz"}) tc3.push_back(dir / "traces" / "tc3" / (std::string(name) + ".csv"));
  pipeline::cmd_detect({dir / "detect", dir / "mine" / "rules.txt", tc3, pre});
  for (const auto& name : {"qsort", "prime", "miniz"}) {
    const auto text = slurp(dir / "detect" / (std::string(name) + ".detections.csv"));
    EXPECT_EQ(text.rfind("row,predicted,label,fired_rules\n", 0), 0u);
  }

  const auto report = pipeline::cmd_eval({dir / "eval", dir / "mine" / "rules.txt", tc3, "Test Case 3", pre});
  EXPECT_EQ(report.instances(), 9000u);
  EXPECT_GE(report.recall, 0.9);
  for (const auto* f : {"report.json", "report.txt", "report.csv", "eval.manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / "eval" / f)) << f;
  }
}

TEST(Pipeline, ReproIsIdempotent) {
  const auto a = fresh_dir("repro_a");
  const auto b = fresh_dir("repro_b");
  pipeline::ReproCommand cmd;
  cmd.out_dir = a;
  cmd.synth = small_synth();
  const auto ra = pipeline::cmd_repro(cmd);
  cmd.out_dir = b;
  const auto rb = pipeline::cmd_repro(cmd);
  EXPECT_EQ(ra.rules, rb.rules);
  ASSERT_EQ(ra.reports.size(), 5u);
  EXPECT_EQ(ra.reports[0].test_case_id, "RG");
  EXPECT_EQ(slurp(a / "rules.txt"), slurp(b / "rules.txt"));
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a / "detections")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    ASSERT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
    ++compared;
  }
  EXPECT_EQ(compared, 2u + 4u + 3u + 7u);
  EXPECT_TRUE(fs::exists(a / "comparison.txt"));
  EXPECT_TRUE(fs::exists(a / "repro.manifest.json"));
  EXPECT_TRUE(fs::exists(a / "traces" / "tc1" / "train" / "fault.csv"));
}

TEST(Cli, RejectsConfidenceAboveOne) {
  const auto dir = fresh_dir("cli_conf");
  pipeline::cmd_synth({dir, small_synth(), std::nullopt, {1}});
  const auto r = cli("mine --out-dir \"" + (dir / "m").string() + "\" --inputs \"" + (dir / "tc1" / "os.csv").string() +
                         "\" --min-confidence 1.01",
                     dir);
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("confidence"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "m" / "rules.txt"));
}

TEST(Cli, DetectWithMismatchedRuleFile) {
  const auto dir = fresh_dir("cli_q");
  pipeline::cmd_synth({dir, small_synth(), std::nullopt, {1}});
  RuleSet seven;
  seven.schema = FeatureSchema({"a", "b", "c", "d", "e", "f", "g"});
  seven.config = MiningConfig::for_features(7);
  save_rules(seven, dir / "q7.txt");
  const auto r = cli("detect --out-dir \"" + (dir / "d").string() + "\" --rules \"" + (dir / "q7.txt").string() +
                         "\" --inputs \"" + (dir / "tc1" / "os.csv").string() + "\"",
                     dir);
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("q=7"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("q=8"), std::string::npos) << r.err;
}

TEST(Cli, SynthThenMine) {
  const auto dir = fresh_dir("cli_ok");
  ASSERT_EQ(cli("synth --out-dir \"" + dir.string() + "\" --tc 1 --seed 5", dir).code, 0);
  const auto r = cli("mine --out-dir \"" + (dir / "m").string() + "\" --flag-rule absolute --inputs \"" +
                         (dir / "tc1" / "os.csv").string() + "\" \"" + (dir / "tc1" / "fault.csv").string() + "\"",
                     dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NO_THROW(load_rules(dir / "m" / "rules.txt"));
  EXPECT_EQ(json::parse(slurp(dir / "synth.manifest.json"))["seed"], 5);
}
