#include <gtest/gtest.h>

#include "vlcm/cse.hpp"
#include "vlcm/rng.hpp"

using namespace vlcm;

namespace {
std::vector<LargeConstant> make(std::initializer_list<const char*> hex) {
  std::vector<LargeConstant> out;
  for (const char* h : hex) out.push_back(parse_hex(h));
  return out;
}

void sweep_check(const Design& d, unsigned trials = 200) {
  SplitMix64 rng(17);
  std::vector<BigUint> xs = {0, 1, (BigUint(1) << d.input_width) - 1};
  for (unsigned i = 0; i < trials; ++i) xs.push_back(rng.next_bits(d.input_width));
  for (const BigUint& x : xs) {
    std::vector<BigUint> got = evaluate(d, x);
    for (std::size_t k = 0; k < d.outputs.size(); ++k)
      ASSERT_EQ(got[k], d.outputs[k].target * x) << d.outputs[k].name;
  }
}
}  // namespace

TEST(BuildDesign, WorkedExampleAreaCounts) {
  auto constants = make({"0xFF1317A64C", "0xFFFF134C17A6"});
  Design d = build_design(constants, {8, PartitionStrategy::Strict},
                          SolverKind::ExactSmall, OptimizationMode::Area, 16);
  sweep_check(d);
  EXPECT_EQ(d.stats.oper, 13u);
  EXPECT_EQ(d.stats.step, 7u);
}

TEST(BuildDesign, WorkedExampleDelayCounts) {
  auto constants = make({"0xFF1317A64C", "0xFFFF134C17A6"});
  Design d = build_design(constants, {8, PartitionStrategy::Strict},
                          SolverKind::ExactSmall, OptimizationMode::Delay, 16);
  sweep_check(d);
  EXPECT_EQ(d.stats.oper, 14u);
  EXPECT_EQ(d.stats.step, 5u);
}

TEST(BuildDesign, WorkedExampleExtractsOnePattern) {
  auto constants = make({"0xFF1317A64C", "0xFFFF134C17A6"});
  PartitionResult part =
      partition(constants, {8, PartitionStrategy::Strict});
  AdderGraph graph;
  std::map<std::uint64_t, std::uint32_t> value_to_node;
  auto [prob, fixups] = normalize(part.coefficients);
  apply_solution(graph, gb_exact_small(prob), value_to_node);
  TermContext ctx;
  ctx.value_to_node = &value_to_node;
  ctx.graph = &graph;
  std::vector<LinearEquation> eqs = part.equations;
  SubexpressionTable table =
      eliminate_common_subexpressions(eqs, OptimizationMode::Area, ctx);
  // c166 + c23<<8 occurs in both constants and is the only repeated pattern
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table[0].value, 6054);  // 166 + 23*256
  EXPECT_EQ(table[0].occurrences, 2u);
}

TEST(Cse, NoPatternsIsAFixpoint) {
  auto constants = make({"0x5"});  // single tiny equation, nothing repeats
  PartitionResult part = partition(constants, {4, PartitionStrategy::Strict});
  AdderGraph graph;
  std::map<std::uint64_t, std::uint32_t> value_to_node;
  auto [prob, fixups] = normalize(part.coefficients);
  apply_solution(graph, gb_heuristic(prob), value_to_node);
  TermContext ctx;
  ctx.value_to_node = &value_to_node;
  ctx.graph = &graph;
  std::vector<LinearEquation> eqs = part.equations;
  std::vector<LinearEquation> before = eqs;
  SubexpressionTable table =
      eliminate_common_subexpressions(eqs, OptimizationMode::Area, ctx);
  EXPECT_TRUE(table.empty());
  ASSERT_EQ(eqs.size(), before.size());
  EXPECT_EQ(eqs[0].terms.size(), before[0].terms.size());
}

TEST(Cse, MostFrequentPatternWinsFirst) {
  // 0xA6 || 0x17 adjacency appears three times, 0xA6 || 0x4C once
  auto constants = make({"0xA617A617A64C"});
  Design d = build_design(constants, {8, PartitionStrategy::Strict},
                          SolverKind::Heuristic, OptimizationMode::Area, 16);
  sweep_check(d);
  bool found = false;
  for (const Node& n : d.graph.nodes())
    if (n.label.rfind("exp_", 0) == 0 && n.value == 0xA617) found = true;
  EXPECT_TRUE(found);
}

TEST(BuildDesign, SingleRepeatedConstantSharesEverything) {
  auto constants = make({"0xABCD", "0xABCD"});
  Design d = build_design(constants, {8, PartitionStrategy::Strict},
                          SolverKind::Heuristic, OptimizationMode::Area, 16);
  sweep_check(d);
  ASSERT_EQ(d.outputs.size(), 2u);
  EXPECT_EQ(d.outputs[0].node, d.outputs[1].node);
}

TEST(BuildDesign, DelayNeverDeeperThanArea) {
  SplitMix64 rng(31);
  for (int i = 0; i < 8; ++i) {
    LargeConstant lc;
    lc.value = rng.next_odd_constant(300);
    lc.bit_width = 300;
    std::vector<LargeConstant> constants = {lc};
    Design area = build_design(constants, {16, PartitionStrategy::Strict},
                               SolverKind::Heuristic, OptimizationMode::Area, 16);
    Design delay = build_design(constants, {16, PartitionStrategy::Strict},
                                SolverKind::Heuristic, OptimizationMode::Delay, 16);
    sweep_check(area, 20);
    sweep_check(delay, 20);
    EXPECT_LE(delay.stats.step, area.stats.step) << "iter " << i;
  }
}

TEST(BuildDesign, CommonDigitStrategyVerifies) {
  SplitMix64 rng(41);
  std::vector<LargeConstant> constants;
  for (int i = 0; i < 2; ++i) {
    LargeConstant lc;
    lc.value = rng.next_odd_constant(256);
    lc.bit_width = 256;
    constants.push_back(std::move(lc));
  }
  for (OptimizationMode mode : {OptimizationMode::Area, OptimizationMode::Delay}) {
    Design d = build_design(constants, {8, PartitionStrategy::CommonDigit},
                            SolverKind::Heuristic, mode, 16);
    sweep_check(d, 50);
  }
}
