#include <gtest/gtest.h>

#include <algorithm>

#include "drsam/json_io.hpp"
#include "drsam/preprocess.hpp"
#include "drsam/synth.hpp"

using namespace drsam;

namespace {

SynthConfig benign_only(std::size_t rows) {
  SynthConfig c;
  c.n_benign = rows;
  c.n_attack = 0;
  c.n_transient = 0;
  return c;
}

// Mostly benign, so attack rows barely move the per-file statistics.
SynthConfig sparse_attacks() {
  SynthConfig c;
  c.n_benign = 20000;
  c.n_attack = 100;
  c.n_transient = 0;
  return c;
}

}  // namespace

TEST(Synth, Deterministic) {
  for (int tc = 1; tc <= 4; ++tc) EXPECT_EQ(generate_test_case(tc, SynthConfig{}), generate_test_case(tc, SynthConfig{}));
  SynthConfig other;
  other.seed += 1;
  EXPECT_NE(generate_test_case(1, SynthConfig{}), generate_test_case(1, other));
}

TEST(Synth, TracesAreValid) {
  const auto schema = FeatureSchema::standard();
  for (int tc = 1; tc <= 4; ++tc) {
    for (const auto& t : generate_test_case(tc, SynthConfig{})) EXPECT_NO_THROW(validate_trace(t, schema));
  }
}

TEST(Synth, NoiseFlagRate) {
  auto c = benign_only(20000);
  c.stress_trigger_prob = 0.0;
  const auto fm = flag(generate(c), PreprocessConfig{});
  std::size_t ones = 0;
  for (auto t : fm.triggered_counts) ones += t;
  const double rate = static_cast<double>(ones) / static_cast<double>(fm.rows() * fm.q);
  EXPECT_GT(rate, 0.0005);
  EXPECT_LT(rate, 0.003);
}

// Baseline noise only, so the flag line sits about 3 sigma above the baseline.
TEST(Synth, AttackRowsTriggerNearlyEverything) {
  auto c = sparse_attacks();
  c.stress_trigger_prob = 0.0;
  const auto fm = flag(generate(c), PreprocessConfig{});
  std::size_t attacks = 0, dense = 0;
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    if (!fm.labels[i]) continue;
    ++attacks;
    dense += fm.triggered_counts[i] >= fm.q - 1 ? 1 : 0;
  }
  ASSERT_EQ(attacks, 100u);
  EXPECT_GE(static_cast<double>(dense) / static_cast<double>(attacks), 0.99);
}

TEST(Synth, AttackRowsSurviveFiltering) {
  const auto fm = flag(generate(sparse_attacks()), PreprocessConfig{});
  std::size_t survive = 0;
  for (auto l : filter_instances(fm, PreprocessConfig{}).labels) survive += l;
  EXPECT_GE(static_cast<double>(survive) / 100.0, 0.99);
}

TEST(Synth, BenignRowsStayBelowHalfPlusOne) {
  const auto fm = flag(generate(benign_only(20000)), PreprocessConfig{});
  const auto worst = *std::max_element(fm.triggered_counts.begin(), fm.triggered_counts.end());
  EXPECT_LE(worst, fm.q / 2 + 1);
}

TEST(Synth, TestCaseOneIsBalanced) {
  const auto traces = generate_test_case(1, SynthConfig{});
  ASSERT_EQ(traces.size(), 2u);
  EXPECT_EQ(traces[0].workload_id, "os");
  EXPECT_EQ(traces[1].workload_id, "fault");
  std::size_t rows = 0, attacks = 0;
  for (const auto& t : traces) {
    rows += t.rows();
    attacks += t.attack_count();
  }
  EXPECT_EQ(traces[0].attack_count(), 0u);
  EXPECT_NEAR(static_cast<double>(attacks) / static_cast<double>(rows), 0.5, 0.05);
}

TEST(Synth, BenchmarkTestCases) {
  const auto tc2 = generate_test_case(2, SynthConfig{});
  const auto tc3 = generate_test_case(3, SynthConfig{});
  const auto tc4 = generate_test_case(4, SynthConfig{});
  ASSERT_EQ(tc2.size(), 4u);
  ASSERT_EQ(tc3.size(), 3u);
  ASSERT_EQ(tc4.size(), 7u);
  std::vector<std::string> names;
  for (const auto& t : tc3) names.push_back(t.workload_id);
  EXPECT_EQ(names, (std::vector<std::string>{"qsort", "prime", "miniz"}));
  for (const auto& t : tc4) {
    EXPECT_EQ(t.rows(), 12000u);
    const double frac = static_cast<double>(t.attack_count()) / static_cast<double>(t.rows());
    EXPECT_GT(frac, 0.02);
    EXPECT_LT(frac, 0.05);
  }
  EXPECT_NE(tc2[0].values, tc2[1].values);
  EXPECT_THROW(generate_test_case(5, SynthConfig{}), ValidationError);
}

TEST(Synth, ConfigValidation) {
  SynthConfig c;
  c.attack_shift[0] = 2.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = SynthConfig{};
  c.benign_base_std.pop_back();
  EXPECT_THROW(c.validate(), ValidationError);
  c = SynthConfig{};
  c.transient_min = 9;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Synth, JsonConfigRoundTrip) {
  SynthConfig c;
  c.seed = 7;
  c.n_benign = 123;
  c.stress_shift = 3.5;
  const auto j = to_json(c);
  EXPECT_EQ(to_json(synth_config_from_json(j)).dump(), j.dump());
  auto bad = j;
  bad["no_such_key"] = 1;
  EXPECT_THROW(synth_config_from_json(bad), Error);
  EXPECT_EQ(synth_config_from_json(json::object()).seed, SynthConfig{}.seed);
}
