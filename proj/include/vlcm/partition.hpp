#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "vlcm/numeric.hpp"

namespace vlcm {

enum class PartitionStrategy { Strict, CommonDigit };

struct PartitionConfig {
  unsigned p = 16;  // multiple of 4, in [4, 28]
  PartitionStrategy strategy = PartitionStrategy::Strict;
};

inline void check_partition_width(unsigned p) {
  if (p < 4 || p > 28 || p % 4 != 0)
    throw ConfigError("partition width must be a multiple of 4 in [4, 28], got " +
                      std::to_string(p));
}

enum class TermKind { Coefficient, Sequence, Subexpression };

// One addend of a linear equation.  For coefficients `value` is the p-bit
// chunk, for sequences it is the run length r (the term stands for 2^r - 1),
// for subexpressions it is the table index.
struct Term {
  TermKind kind;
  std::uint64_t value;
  unsigned shift;
  int sign = 1;
};

struct LinearEquation {
  LargeConstant target;
  std::vector<Term> terms;
};

struct PartitionResult {
  std::vector<std::uint64_t> coefficients;  // set C, ascending, no zeros
  std::vector<unsigned> sequences;          // set Seqf of run lengths, ascending
  std::vector<LinearEquation> equations;
};

namespace detail {

inline std::uint64_t chunk_at(const BigUint& v, unsigned shift, unsigned p) {
  return static_cast<std::uint64_t>((v >> shift) & ((BigUint(1) << p) - 1));
}

// Strict rule applied to one value: cut at p-aligned boundaries, fold maximal
// runs of all-ones chunks into sequence terms, drop zero chunks.
inline void strict_terms(const BigUint& value, unsigned p,
                         std::vector<Term>& terms) {
  const std::uint64_t ones = (p == 64) ? ~0ull : (1ull << p) - 1;
  const unsigned nchunks = (bit_length(value) + p - 1) / p;
  unsigned i = 0;
  while (i < nchunks) {
    std::uint64_t c = chunk_at(value, i * p, p);
    if (c == 0) {
      ++i;
      continue;
    }
    if (c == ones) {
      unsigned run = 1;
      while (i + run < nchunks && chunk_at(value, (i + run) * p, p) == ones)
        ++run;
      terms.push_back({TermKind::Sequence, run * p, i * p, 1});
      i += run;
      continue;
    }
    terms.push_back({TermKind::Coefficient, c, i * p, 1});
    ++i;
  }
}

}  // namespace detail

inline BigUint term_value(const Term& t) {
  switch (t.kind) {
    case TermKind::Coefficient:
      return BigUint(t.value);
    case TermKind::Sequence:
      return (BigUint(1) << t.value) - 1;
    case TermKind::Subexpression:
      throw SolverError("subexpression term cannot be valued without a table");
  }
  return 0;
}

inline BigUint reassemble(const LinearEquation& eq) {
  BigUint acc = 0;
  for (const Term& t : eq.terms)
    acc += t.sign * (term_value(t) << t.shift);
  return acc;
}

inline bool validate_partition(const PartitionResult& result) {
  for (const LinearEquation& eq : result.equations)
    if (reassemble(eq) != eq.target.value) return false;
  return true;
}

inline PartitionResult strict_partition(const std::vector<LargeConstant>& constants,
                                        const PartitionConfig& cfg) {
  check_partition_width(cfg.p);
  PartitionResult out;
  for (const LargeConstant& lc : constants) {
    LinearEquation eq;
    eq.target = lc;
    detail::strict_terms(lc.value, cfg.p, eq.terms);
    out.equations.push_back(std::move(eq));
  }
  for (const LinearEquation& eq : out.equations)
    for (const Term& t : eq.terms) {
      if (t.kind == TermKind::Coefficient) out.coefficients.push_back(t.value);
      if (t.kind == TermKind::Sequence)
        out.sequences.push_back(static_cast<unsigned>(t.value));
    }
  std::sort(out.coefficients.begin(), out.coefficients.end());
  out.coefficients.erase(
      std::unique(out.coefficients.begin(), out.coefficients.end()),
      out.coefficients.end());
  std::sort(out.sequences.begin(), out.sequences.end());
  out.sequences.erase(std::unique(out.sequences.begin(), out.sequences.end()),
                      out.sequences.end());
  return out;
}

// Common-digit strategy: p-bit windows at hex-digit offsets whose value
// repeats across all constants are extracted first (most frequent first,
// larger value then lower shift on ties), then the residual digits fall back
// to the strict rule.
inline PartitionResult common_digit_partition(
    const std::vector<LargeConstant>& constants, const PartitionConfig& cfg) {
  check_partition_width(cfg.p);
  const unsigned p = cfg.p;

  struct Extraction {
    std::vector<Term> terms;   // extracted coefficient terms
    BigUint residual;
  };
  std::vector<Extraction> per_constant(constants.size());
  for (std::size_t i = 0; i < constants.size(); ++i)
    per_constant[i].residual = constants[i].value;

  for (;;) {
    // Count window values over the current residuals.
    std::map<std::uint64_t, std::vector<std::pair<std::size_t, unsigned>>> sites;
    for (std::size_t i = 0; i < constants.size(); ++i) {
      const BigUint& r = per_constant[i].residual;
      const unsigned top = bit_length(r);
      for (unsigned s = 0; s + 1 <= top; s += 4) {
        std::uint64_t w = detail::chunk_at(r, s, p);
        // window must lie fully inside the residual's digits
        if (w == 0) continue;
        sites[w].push_back({i, s});
      }
    }
    // Best value: max occurrence count > 1, ties to larger value.
    std::uint64_t best_value = 0;
    std::size_t best_count = 1;
    for (const auto& [w, occ] : sites) {
      if (occ.size() > best_count ||
          (occ.size() == best_count && w > best_value && occ.size() > 1)) {
        best_value = w;
        best_count = occ.size();
      }
    }
    if (best_count < 2) break;

    // Extract non-overlapping occurrences, lowest shift first per constant.
    std::vector<std::pair<unsigned, unsigned>> taken_this_round;  // unused across constants
    std::size_t extracted = 0;
    std::vector<unsigned> last_end(constants.size(), 0);
    std::vector<bool> started(constants.size(), false);
    for (const auto& [ci, s] : sites[best_value]) {
      if (started[ci] && s < last_end[ci]) continue;  // overlap within constant
      // re-read from residual: earlier extraction this round may have blanked it
      if (detail::chunk_at(per_constant[ci].residual, s, p) != best_value) continue;
      per_constant[ci].terms.push_back({TermKind::Coefficient, best_value, s, 1});
      per_constant[ci].residual -= BigUint(best_value) << s;
      started[ci] = true;
      last_end[ci] = s + p;
      ++extracted;
    }
    if (extracted < 2) {
      // occurrences collided away; nothing left to share for this value
      break;
    }
  }

  PartitionResult out;
  for (std::size_t i = 0; i < constants.size(); ++i) {
    LinearEquation eq;
    eq.target = constants[i];
    eq.terms = std::move(per_constant[i].terms);
    detail::strict_terms(per_constant[i].residual, p, eq.terms);
    std::sort(eq.terms.begin(), eq.terms.end(),
              [](const Term& a, const Term& b) { return a.shift < b.shift; });
    out.equations.push_back(std::move(eq));
  }
  for (const LinearEquation& eq : out.equations)
    for (const Term& t : eq.terms) {
      if (t.kind == TermKind::Coefficient) out.coefficients.push_back(t.value);
      if (t.kind == TermKind::Sequence)
        out.sequences.push_back(static_cast<unsigned>(t.value));
    }
  std::sort(out.coefficients.begin(), out.coefficients.end());
  out.coefficients.erase(
      std::unique(out.coefficients.begin(), out.coefficients.end()),
      out.coefficients.end());
  std::sort(out.sequences.begin(), out.sequences.end());
  out.sequences.erase(std::unique(out.sequences.begin(), out.sequences.end()),
                      out.sequences.end());
  return out;
}

inline PartitionResult partition(const std::vector<LargeConstant>& constants,
                                 const PartitionConfig& cfg) {
  return cfg.strategy == PartitionStrategy::Strict
             ? strict_partition(constants, cfg)
             : common_digit_partition(constants, cfg);
}

}  // namespace vlcm
