#include <gtest/gtest.h>

#include "drsam/trace.hpp"
#include "generators.hpp"

using namespace drsam;

namespace {

WorkloadTrace filled(std::size_t rows, std::size_t cols, double v = 1.0) {
  WorkloadTrace t{"t", std::vector<std::vector<double>>(rows, std::vector<double>(cols, v)), std::vector<Label>(rows, 0)};
  return t;
}

std::string error_of(const WorkloadTrace& t, const FeatureSchema& s) {
  try {
    validate_trace(t, s);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(FeatureSchema, StandardOrder) {
  const auto s = FeatureSchema::standard();
  ASSERT_EQ(s.q(), 8u);
  EXPECT_EQ(s.name(0), "l1i_cache_misses");
  EXPECT_EQ(s.name(1), "branch_mispredictions");
  EXPECT_EQ(s.name(2), "incorrect_conditional_branches");
  EXPECT_EQ(s.name(3), "total_executed_branches");
  EXPECT_EQ(s.name(4), "fetch_stalls");
  EXPECT_EQ(s.name(5), "tlb_accesses");
  EXPECT_EQ(s.name(6), "total_load_instructions");
  EXPECT_EQ(s.name(7), "total_store_instructions");
  EXPECT_EQ(s.index_of("fetch_stalls"), 4u);
  EXPECT_EQ(s.index_of("nope"), 8u);
}

TEST(FeatureSchema, RejectsBadNames) {
  EXPECT_THROW(FeatureSchema({}), ValidationError);
  EXPECT_THROW(FeatureSchema({"a", "a"}), ValidationError);
  EXPECT_THROW(FeatureSchema({"a", ""}), ValidationError);
  EXPECT_THROW(FeatureSchema({"a,b"}), ValidationError);
  EXPECT_THROW(FeatureSchema(std::vector<std::string>(32, "x")), ValidationError);
}

TEST(ValidateTrace, AcceptsWellFormed) {
  const auto t = filled(3, 8);
  EXPECT_EQ(&validate_trace(t, FeatureSchema::standard()), &t);
}

TEST(ValidateTrace, WidthMismatchCitesRowZero) {
  const auto msg = error_of(filled(3, 7), FeatureSchema::standard());
  EXPECT_NE(msg.find("row 0"), std::string::npos) << msg;
}

TEST(ValidateTrace, NegativeValueCitesCell) {
  auto t = filled(3, 8);
  t.values[2][4] = -1.0;
  const auto msg = error_of(t, FeatureSchema::standard());
  EXPECT_NE(msg.find("(2,4)"), std::string::npos) << msg;
}

TEST(ValidateTrace, OtherViolations) {
  const auto s = FeatureSchema::standard();
  auto t = filled(3, 8);
  t.labels.pop_back();
  EXPECT_NE(error_of(t, s).find("label"), std::string::npos);

  t = filled(3, 8);
  t.values[1][1] = std::nan("");
  EXPECT_NE(error_of(t, s).find("(1,1)"), std::string::npos);

  t = filled(3, 8);
  t.values[0][0] = HUGE_VAL;
  EXPECT_FALSE(error_of(t, s).empty());

  t = filled(3, 8);
  t.labels[2] = 2;
  EXPECT_NE(error_of(t, s).find("row 2"), std::string::npos);

  EXPECT_FALSE(error_of(filled(0, 8), s).empty());
}

TEST(FlagMatrix, TriggeredCountsMatchPopcount) {
  gen::Engine rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t q = 1 + rng() % 12;
    const auto fm = gen::flag_matrix(rng, q, 1 + rng() % 40);
    for (std::size_t i = 0; i < fm.rows(); ++i) {
      std::size_t ones = 0;
      for (std::size_t j = 0; j < q; ++j) ones += fm.flag(i, j) ? 1 : 0;
      ASSERT_EQ(fm.triggered_counts[i], ones);
      ASSERT_LE(ones, q);
    }
  }
}

TEST(FlagMatrix, RejectsBitsBeyondQ) {
  EXPECT_THROW(FlagMatrix::from_rows("x", 3, {0b1000}, {0}), ValidationError);
  EXPECT_THROW(FlagMatrix::from_rows("x", 3, {0b1}, {}), ValidationError);
}
