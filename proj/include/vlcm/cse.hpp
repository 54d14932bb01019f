#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "vlcm/adder_graph.hpp"
#include "vlcm/mcm.hpp"
#include "vlcm/partition.hpp"

namespace vlcm {

enum class OptimizationMode { Area, Delay };
enum class SolverKind { Heuristic, ExactSmall, DbrBinary, DbrCsd };

// Two-term subexpression produced by CSE.  The left operand sits at relative
// shift 0; `right.shift` is relative to it.
struct Subexpression {
  unsigned id = 0;
  Term left, right;
  std::size_t occurrences = 0;
  BigUint value;               // strictly positive definition value
  unsigned depth_estimate = 0;
};

using SubexpressionTable = std::vector<Subexpression>;

// Term valuation/depth context during CSE and assembly.
struct TermContext {
  const SubexpressionTable* table = nullptr;
  // depth of a coefficient's odd fundamental node; filled from the graph
  const std::map<std::uint64_t, std::uint32_t>* value_to_node = nullptr;
  const AdderGraph* graph = nullptr;

  BigUint value_of(const Term& t) const {
    if (t.kind == TermKind::Subexpression) return (*table)[t.value].value;
    return term_value(t);
  }

  unsigned depth_of(const Term& t) const {
    switch (t.kind) {
      case TermKind::Sequence:
        return 1;
      case TermKind::Subexpression:
        return (*table)[t.value].depth_estimate;
      case TermKind::Coefficient: {
        std::uint64_t fund = t.value >> std::countr_zero(t.value);
        if (fund == 1) return 0;
        return graph->node(value_to_node->at(fund)).depth;
      }
    }
    return 0;
  }
};

namespace detail {

// Identity of a two-term pattern, shift-translation invariant.
using PatternKey = std::tuple<int, std::uint64_t, int,   // first term
                              int, std::uint64_t, int,   // second term
                              unsigned>;                 // shift delta

inline bool term_before(const Term& a, const Term& b) {
  return std::tuple(a.shift, static_cast<int>(a.kind), a.value, a.sign) <
         std::tuple(b.shift, static_cast<int>(b.kind), b.value, b.sign);
}

inline PatternKey pattern_of(const Term& a, const Term& b) {
  const Term& first = term_before(a, b) ? a : b;
  const Term& second = term_before(a, b) ? b : a;
  return {static_cast<int>(first.kind), first.value, first.sign,
          static_cast<int>(second.kind), second.value, second.sign,
          second.shift - first.shift};
}

// Greedy left-to-right non-overlapping matches of a pattern in one equation.
inline std::vector<std::pair<std::size_t, std::size_t>> greedy_matches(
    const std::vector<Term>& terms, const PatternKey& key) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<bool> used(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (used[j]) continue;
      if (pattern_of(terms[i], terms[j]) == key) {
        used[i] = used[j] = true;
        out.push_back({i, j});
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

// Iterative extraction of the most frequent two-term pattern until no
// pattern occurs twice.  Rewrites the equations in place.
inline SubexpressionTable eliminate_common_subexpressions(
    std::vector<LinearEquation>& equations, OptimizationMode mode,
    TermContext ctx, SubexpressionTable table = {}) {
  for (;;) {
    ctx.table = &table;
    // candidate -> non-overlapping occurrence count
    std::map<detail::PatternKey, std::size_t> counts;
    for (const LinearEquation& eq : equations) {
      std::map<detail::PatternKey, std::size_t> raw;
      for (std::size_t i = 0; i < eq.terms.size(); ++i)
        for (std::size_t j = i + 1; j < eq.terms.size(); ++j)
          raw[detail::pattern_of(eq.terms[i], eq.terms[j])]++;
      for (const auto& [key, n] : raw) {
        // raw pair count over-counts overlaps; the greedy matcher gives the
        // usable occurrence count
        counts[key] +=
            n == 1 ? 1 : detail::greedy_matches(eq.terms, key).size();
      }
    }

    auto term_from_key = [](int kind, std::uint64_t value, int sign,
                            unsigned shift) {
      return Term{static_cast<TermKind>(kind), value, shift, sign};
    };
    std::optional<detail::PatternKey> best;
    std::size_t best_count = 1;
    auto metric = [&](const detail::PatternKey& key) {
      auto [ka, va, sa, kb, vb, sb, delta] = key;
      Term a = term_from_key(ka, va, sa, 0);
      Term b = term_from_key(kb, vb, sb, delta);
      unsigned widths = bit_length(ctx.value_of(a)) + bit_length(ctx.value_of(b));
      unsigned depth = 1 + std::max(ctx.depth_of(a), ctx.depth_of(b));
      return mode == OptimizationMode::Delay ? std::pair(depth, widths)
                                             : std::pair(0u, widths);
    };
    for (const auto& [key, n] : counts) {
      if (n < 2) continue;
      if (!best || n > best_count ||
          (n == best_count && metric(key) < metric(*best)))
        best = key;
      if (n >= best_count) best_count = n;
    }
    if (!best) return table;

    auto [ka, va, sa, kb, vb, sb, delta] = *best;
    Subexpression sub;
    sub.id = static_cast<unsigned>(table.size());
    sub.left = term_from_key(ka, va, sa, 0);
    sub.right = term_from_key(kb, vb, sb, delta);
    sub.occurrences = best_count;
    BigUint value = sa * ctx.value_of(sub.left) +
                    sb * (ctx.value_of(sub.right) << delta);
    int replacement_sign = 1;
    if (value < 0) {  // cannot happen with the shipped partition strategies
      value = -value;
      sub.left.sign = -sub.left.sign;
      sub.right.sign = -sub.right.sign;
      replacement_sign = -1;
    }
    sub.value = value;
    sub.depth_estimate =
        1 + std::max(ctx.depth_of(sub.left), ctx.depth_of(sub.right));
    table.push_back(sub);

    for (LinearEquation& eq : equations) {
      auto matches = detail::greedy_matches(eq.terms, *best);
      if (matches.empty()) continue;
      std::vector<bool> drop(eq.terms.size(), false);
      for (auto [i, j] : matches) {
        std::size_t anchor = std::min(i, j);
        eq.terms[anchor] = Term{TermKind::Subexpression, sub.id,
                                eq.terms[anchor].shift, replacement_sign};
        drop[std::max(i, j)] = true;
      }
      std::vector<Term> rest;
      for (std::size_t k = 0; k < eq.terms.size(); ++k)
        if (!drop[k]) rest.push_back(eq.terms[k]);
      eq.terms = std::move(rest);
    }
  }
}

namespace detail {

// A term resolved against the graph: value_of(term) == value(node) << extra.
struct ResolvedTerm {
  std::uint32_t node;
  unsigned extra_shift;
  unsigned shift;  // absolute shift within the equation
  int sign;
  BigUint value;   // |term value|, without the equation shift
  unsigned depth;
};

inline std::uint32_t fuse(AdderGraph& graph, const ResolvedTerm& a,
                          const ResolvedTerm& b, unsigned base_shift,
                          const std::string& label = "") {
  // result value = sign_a*val_a<<(sa-base) + sign_b*val_b<<(sb-base), kept
  // positive by operand order
  BigUint va = a.value << (a.shift - base_shift);
  BigUint vb = b.value << (b.shift - base_shift);
  if (a.sign == b.sign)
    return graph.add_node(NodeOp::Add, a.node,
                          a.extra_shift + (a.shift - base_shift), b.node,
                          b.extra_shift + (b.shift - base_shift), label);
  // mixed signs: the magnitude-larger term leads the subtraction
  const ResolvedTerm& pos = va > vb ? a : b;
  const ResolvedTerm& neg = (&pos == &a) ? b : a;
  return graph.add_node(NodeOp::Sub, pos.node,
                        pos.extra_shift + (pos.shift - base_shift), neg.node,
                        neg.extra_shift + (neg.shift - base_shift), label);
}

}  // namespace detail

// Reduces each rewritten equation to a single output node.  Area mode fuses
// the two smallest-width terms; delay mode merges by depth for a
// minimum-depth tree.
inline void assemble_final_equations(Design& design,
                                     std::vector<LinearEquation>& equations,
                                     const SubexpressionTable& table,
                                     OptimizationMode mode, TermContext ctx,
                                     const std::vector<std::uint32_t>& sub_nodes) {
  AdderGraph& graph = design.graph;
  for (std::size_t e = 0; e < equations.size(); ++e) {
    LinearEquation& eq = equations[e];
    std::vector<detail::ResolvedTerm> terms;
    for (const Term& t : eq.terms) {
      detail::ResolvedTerm rt;
      rt.shift = t.shift;
      rt.sign = t.sign;
      rt.value = ctx.value_of(t);
      rt.depth = ctx.depth_of(t);
      switch (t.kind) {
        case TermKind::Coefficient: {
          unsigned s = static_cast<unsigned>(std::countr_zero(t.value));
          std::uint64_t fund = t.value >> s;
          rt.node = fund == 1 ? graph.input_node()
                              : ctx.value_to_node->at(fund);
          rt.extra_shift = s;
          break;
        }
        case TermKind::Sequence:
          rt.node = ctx.value_to_node->at((std::uint64_t{1} << t.value) - 1);
          rt.extra_shift = 0;
          break;
        case TermKind::Subexpression:
          rt.node = sub_nodes.at(t.value);
          rt.extra_shift = 0;
          break;
      }
      terms.push_back(std::move(rt));
    }
    std::string name = "lc_" + std::to_string(e + 1);
    while (terms.size() > 1) {
      // pick the pair to fuse
      auto cost = [&](const detail::ResolvedTerm& t) {
        unsigned width = bit_length(t.value) + t.shift;
        return mode == OptimizationMode::Delay
                   ? std::tuple(t.depth, width, t.shift)
                   : std::tuple(0u, width, t.shift);
      };
      std::size_t ia = 0, ib = 1;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        if (cost(terms[i]) < cost(terms[ia])) { ib = ia; ia = i; }
        else if (i != ia && cost(terms[i]) < cost(terms[ib])) ib = i;
      }
      const detail::ResolvedTerm &ta = terms[ia], &tb = terms[ib];
      unsigned base = std::min(ta.shift, tb.shift);
      bool last = terms.size() == 2;
      std::uint32_t id = detail::fuse(graph, ta, tb, base, last ? name : "");
      BigUint signed_sum = ta.sign * (ta.value << (ta.shift - base)) +
                           tb.sign * (tb.value << (tb.shift - base));
      detail::ResolvedTerm fused;
      fused.node = id;
      fused.extra_shift = 0;
      fused.shift = base;
      fused.sign = signed_sum < 0 ? -1 : 1;
      fused.value = graph.node(id).value;
      fused.depth = graph.node(id).depth;
      std::size_t hi = std::max(ia, ib), lo = std::min(ia, ib);
      terms.erase(terms.begin() + hi);
      terms.erase(terms.begin() + lo);
      terms.push_back(std::move(fused));
    }
    const detail::ResolvedTerm& last = terms.front();
    if (last.sign < 0)
      throw SolverError("equation assembled to a negative value");
    OutputRef out;
    out.node = last.node;
    out.shift = last.shift + last.extra_shift;
    out.name = name;
    out.target = eq.target.value;
    if (graph.node(out.node).value << out.shift != out.target)
      throw SolverError("assembled output does not match its target");
    design.outputs.push_back(std::move(out));
  }
}

// End-to-end pipeline: partition, sequence nodes, coefficient realization,
// CSE, assembly.  The returned design is verified at x = 1.
inline Design build_design(const std::vector<LargeConstant>& constants,
                           const PartitionConfig& pcfg, SolverKind solver,
                           OptimizationMode mode, unsigned input_width) {
  Design design;
  design.input_width = input_width;
  const auto t0 = std::chrono::steady_clock::now();

  PartitionResult part = partition(constants, pcfg);

  // sequence subexpressions: 2^r - 1 = x<<r - x
  std::map<std::uint64_t, std::uint32_t> value_to_node;
  for (unsigned r : part.sequences) {
    std::uint32_t id =
        design.graph.add_node(NodeOp::Sub, design.graph.input_node(), r,
                              design.graph.input_node(), 0,
                              "seqf_" + std::to_string(r));
    value_to_node[(std::uint64_t{1} << r) - 1] = id;
  }

  auto [problem, fixups] = normalize(part.coefficients);
  McmSolution coeff_sol;
  if (mode == OptimizationMode::Delay && !problem.targets.empty()) {
    std::vector<BigUint> big(problem.targets.begin(), problem.targets.end());
    coeff_sol = gb_delay_constrained(problem, min_adder_steps_set(big));
  } else {
    switch (solver) {
      case SolverKind::Heuristic: coeff_sol = gb_heuristic(problem); break;
      case SolverKind::ExactSmall: coeff_sol = gb_exact_small(problem); break;
      case SolverKind::DbrBinary:
        coeff_sol = dbr(problem, DigitRepresentation::Binary);
        break;
      case SolverKind::DbrCsd:
        coeff_sol = dbr(problem, DigitRepresentation::Csd);
        break;
    }
  }
  apply_solution(design.graph, coeff_sol, value_to_node);
  for (std::uint64_t t : problem.targets)
    design.graph.set_label(value_to_node.at(t), "c" + std::to_string(t));

  TermContext ctx;
  ctx.value_to_node = &value_to_node;
  ctx.graph = &design.graph;
  std::vector<LinearEquation> equations = part.equations;
  SubexpressionTable table =
      eliminate_common_subexpressions(equations, mode, ctx);
  ctx.table = &table;

  std::vector<std::uint32_t> sub_nodes;
  for (const Subexpression& sub : table) {
    detail::ResolvedTerm l, r;
    auto resolve = [&](const Term& t) {
      detail::ResolvedTerm rt;
      rt.shift = t.shift;
      rt.sign = t.sign;
      rt.value = ctx.value_of(t);
      rt.depth = ctx.depth_of(t);
      if (t.kind == TermKind::Coefficient) {
        unsigned s = static_cast<unsigned>(std::countr_zero(t.value));
        std::uint64_t fund = t.value >> s;
        rt.node = fund == 1 ? design.graph.input_node() : value_to_node.at(fund);
        rt.extra_shift = s;
      } else if (t.kind == TermKind::Sequence) {
        rt.node = value_to_node.at((std::uint64_t{1} << t.value) - 1);
        rt.extra_shift = 0;
      } else {
        rt.node = sub_nodes.at(t.value);
        rt.extra_shift = 0;
      }
      return rt;
    };
    l = resolve(sub.left);
    r = resolve(sub.right);
    sub_nodes.push_back(detail::fuse(design.graph, l, r, 0,
                                     "exp_" + std::to_string(sub.id)));
  }

  assemble_final_equations(design, equations, table, mode, ctx, sub_nodes);

  design.stats = compute_stats(design);
  design.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  // mandatory self-check at x = 1
  std::vector<BigUint> at_one = evaluate(design, 1);
  for (std::size_t i = 0; i < design.outputs.size(); ++i)
    if (at_one[i] != design.outputs[i].target)
      throw SolverError("design verification failed at x=1 for " +
                        design.outputs[i].name);
  return design;
}

}  // namespace vlcm
