#include <gtest/gtest.h>

#include <sstream>

#include "drsam/detector.hpp"
#include "generators.hpp"

using namespace drsam;

namespace {

RuleSet rules_of(std::size_t q, std::vector<FlagRow> antecedents) {
  RuleSet rs;
  if (q != 8) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < q; ++j) names.push_back("c" + std::to_string(j));
    rs.schema = FeatureSchema(names);
  }
  rs.config = MiningConfig::for_features(q);
  for (auto a : antecedents) rs.rules.push_back({ItemSet(a), 0.5, 1.0});
  std::sort(rs.rules.begin(), rs.rules.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.antecedent, b.antecedent); });
  return rs;
}

}  // namespace

TEST(Classify, Examples) {
  const auto rs = rules_of(8, {make_flag_row({0, 1, 2, 3, 4}), make_flag_row({3, 4, 5, 6, 7})});
  const auto fm = FlagMatrix::from_rows(
      "x", 8, {0xFF, make_flag_row({0, 1, 2, 3, 4}), make_flag_row({0, 1, 2, 3, 5, 6, 7}), 0}, {1, 1, 0, 0});
  const auto det = classify(fm, rs);
  EXPECT_EQ(det.predicted, (std::vector<Label>{1, 1, 0, 0}));
  EXPECT_EQ(det.fired_rules[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(det.fired_rules[1], (std::vector<std::size_t>{0}));
  EXPECT_TRUE(det.fired_rules[2].empty());
}

TEST(Classify, EmptyRuleSetPredictsBenign) {
  gen::Engine rng(41);
  const auto fm = gen::flag_matrix(rng, 8, 50);
  const auto det = classify(fm, rules_of(8, {}));
  EXPECT_EQ(det.predicted, std::vector<Label>(50, 0));
}

TEST(Classify, QMismatch) {
  gen::Engine rng(42);
  EXPECT_THROW(classify(gen::flag_matrix(rng, 7, 5), rules_of(8, {0x1F})), SchemaMismatch);
}

TEST(Classify, MonotoneInFlags) {
  gen::Engine rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t q = 1 + rng() % 10;
    std::vector<FlagRow> ante;
    for (int r = 0; r < 1 + static_cast<int>(rng() % 6); ++r) {
      const FlagRow a = static_cast<FlagRow>(rng() & ((FlagRow{1} << q) - 1));
      if (a && std::find(ante.begin(), ante.end(), a) == ante.end()) ante.push_back(a);
    }
    if (ante.empty()) continue;
    auto rs = rules_of(q, ante);
    const auto fm = gen::flag_matrix(rng, q, 40);
    std::vector<FlagRow> more = fm.flags;
    for (auto& r : more) r |= static_cast<FlagRow>(rng() & ((FlagRow{1} << q) - 1));
    const auto a = classify(fm, rs);
    const auto b = classify(FlagMatrix::from_rows("x", q, more, fm.labels), rs);
    for (std::size_t i = 0; i < fm.rows(); ++i) ASSERT_LE(a.predicted[i], b.predicted[i]);
  }
}

TEST(Classify, MonotoneInRules) {
  gen::Engine rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t q = 2 + rng() % 8;
    std::vector<FlagRow> ante;
    for (int r = 0; r < 8; ++r) {
      const FlagRow a = static_cast<FlagRow>(rng() & ((FlagRow{1} << q) - 1));
      if (a && std::find(ante.begin(), ante.end(), a) == ante.end()) ante.push_back(a);
    }
    if (ante.size() < 2) continue;
    const std::vector<FlagRow> fewer(ante.begin(), ante.begin() + static_cast<std::ptrdiff_t>(ante.size() / 2));
    const auto fm = gen::flag_matrix(rng, q, 40);
    const auto a = classify(fm, rules_of(q, fewer));
    const auto b = classify(fm, rules_of(q, ante));
    for (std::size_t i = 0; i < fm.rows(); ++i) ASSERT_LE(a.predicted[i], b.predicted[i]);
  }
}

TEST(DetectionCsv, Layout) {
  Detection det{{1, 0}, {{0, 3}, {}}};
  std::ostringstream a, b;
  format_detection(a, det, {1, 1});
  EXPECT_EQ(a.str(), "row,predicted,label,fired_rules\n0,1,1,0;3\n1,0,1,\n");
  format_detection(b, det, {});
  EXPECT_EQ(b.str(), "row,predicted,label,fired_rules\n0,1,,0;3\n1,0,,\n");
  std::ostringstream c;
  EXPECT_THROW(format_detection(c, det, {1}), ValidationError);
}
