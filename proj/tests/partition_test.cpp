#include <gtest/gtest.h>

#include "vlcm/partition.hpp"
#include "vlcm/rng.hpp"

using namespace vlcm;

namespace {
std::vector<LargeConstant> make(std::initializer_list<const char*> hex) {
  std::vector<LargeConstant> out;
  for (const char* h : hex) out.push_back(parse_hex(h));
  return out;
}
}  // namespace

TEST(PartitionWidth, Bounds) {
  for (unsigned p : {4u, 8u, 12u, 16u, 20u, 24u, 28u})
    EXPECT_NO_THROW(check_partition_width(p));
  for (unsigned p : {0u, 2u, 5u, 6u, 30u, 32u})
    EXPECT_THROW(check_partition_width(p), ConfigError);
}

TEST(StrictPartition, WorkedExample) {
  auto constants = make({"0xFF1317A64C", "0xFFFF134C17A6"});
  PartitionResult r = strict_partition(constants, {8, PartitionStrategy::Strict});
  EXPECT_EQ(r.coefficients, (std::vector<std::uint64_t>{0x13, 0x17, 0x4c, 0xa6}));
  EXPECT_EQ(r.sequences, (std::vector<unsigned>{8, 16}));
  ASSERT_EQ(r.equations.size(), 2u);
  EXPECT_TRUE(validate_partition(r));
  // lc_1 = seqf_8<<32 + c19<<24 + c23<<16 + c166<<8 + c76
  EXPECT_EQ(r.equations[0].terms.size(), 5u);
  EXPECT_EQ(r.equations[1].terms.size(), 5u);
}

TEST(StrictPartition, AllOnesBecomesOneSequence) {
  auto constants = make({"0xFFFFFFFF"});
  PartitionResult r = strict_partition(constants, {8, PartitionStrategy::Strict});
  EXPECT_TRUE(r.coefficients.empty());
  EXPECT_EQ(r.sequences, (std::vector<unsigned>{32}));
  ASSERT_EQ(r.equations[0].terms.size(), 1u);
  EXPECT_TRUE(validate_partition(r));
}

TEST(StrictPartition, SharedCoefficientAppearsOnce) {
  auto constants = make({"0xAB00AB", "0xAB"});
  PartitionResult r = strict_partition(constants, {8, PartitionStrategy::Strict});
  EXPECT_EQ(r.coefficients, (std::vector<std::uint64_t>{0xab}));
  EXPECT_TRUE(validate_partition(r));
}

TEST(CommonDigitPartition, ReassemblesAndReusesWindows) {
  // the byte 0xA6 repeats at 4-bit-aligned positions across both constants
  auto constants = make({"0xA60012A6", "0x77A6"});
  PartitionResult r = common_digit_partition(constants, {8, PartitionStrategy::CommonDigit});
  EXPECT_TRUE(validate_partition(r));
  unsigned uses = 0;
  for (const LinearEquation& eq : r.equations)
    for (const Term& t : eq.terms)
      if (t.kind == TermKind::Coefficient && t.value == 0xa6) ++uses;
  EXPECT_GE(uses, 3u);
}

TEST(Partition, RandomReassemblyProperty) {
  SplitMix64 rng(11);
  for (int iter = 0; iter < 40; ++iter) {
    unsigned width = 400 + static_cast<unsigned>(rng.next() % 601);
    unsigned n = 1 + static_cast<unsigned>(rng.next() % 3);
    std::vector<LargeConstant> constants;
    for (unsigned i = 0; i < n; ++i) {
      LargeConstant lc;
      lc.value = rng.next_odd_constant(width);
      lc.bit_width = width;
      constants.push_back(std::move(lc));
    }
    for (unsigned p : {4u, 8u, 16u, 28u}) {
      for (PartitionStrategy s :
           {PartitionStrategy::Strict, PartitionStrategy::CommonDigit}) {
        PartitionConfig cfg{p, s};
        PartitionResult r = partition(constants, cfg);
        ASSERT_TRUE(validate_partition(r)) << "width=" << width << " p=" << p;
        for (std::uint64_t c : r.coefficients) {
          ASSERT_NE(c, 0u);
          ASSERT_LT(c, std::uint64_t{1} << p);
        }
        // coefficient sets are canonical: ascending, unique
        for (std::size_t i = 1; i < r.coefficients.size(); ++i)
          ASSERT_LT(r.coefficients[i - 1], r.coefficients[i]);
      }
    }
  }
}

TEST(Partition, DeterministicAcrossCalls) {
  SplitMix64 rng(3);
  LargeConstant lc;
  lc.value = rng.next_odd_constant(500);
  lc.bit_width = 500;
  std::vector<LargeConstant> constants = {lc};
  PartitionConfig cfg{8, PartitionStrategy::CommonDigit};
  PartitionResult a = partition(constants, cfg);
  PartitionResult b = partition(constants, cfg);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.sequences, b.sequences);
  ASSERT_EQ(a.equations.size(), b.equations.size());
  for (std::size_t i = 0; i < a.equations.size(); ++i) {
    ASSERT_EQ(a.equations[i].terms.size(), b.equations[i].terms.size());
    for (std::size_t j = 0; j < a.equations[i].terms.size(); ++j) {
      EXPECT_EQ(a.equations[i].terms[j].value, b.equations[i].terms[j].value);
      EXPECT_EQ(a.equations[i].terms[j].shift, b.equations[i].terms[j].shift);
    }
  }
}
