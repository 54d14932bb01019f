#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vlcm/adder_graph.hpp"
#include "vlcm/numeric.hpp"

namespace vlcm {

// Coefficient realization problem over odd fundamentals.
struct McmProblem {
  std::vector<std::uint64_t> targets;  // odd, > 1, ascending, deduplicated
  unsigned max_width = 0;              // bits of the largest target
  std::size_t budget = 5'000'000;      // state cap for the exact search
};

// Maps an original coefficient back onto its odd fundamental.
struct ShiftFixup {
  std::uint64_t original;
  std::uint64_t fundamental;
  unsigned shift;
};

inline std::pair<McmProblem, std::vector<ShiftFixup>> normalize(
    const std::vector<std::uint64_t>& coefficients) {
  McmProblem prob;
  std::vector<ShiftFixup> fixups;
  std::set<std::uint64_t> targets;
  for (std::uint64_t c : coefficients) {
    if (c == 0) throw SolverError("zero coefficient");
    unsigned s = static_cast<unsigned>(std::countr_zero(c));
    std::uint64_t f = c >> s;
    fixups.push_back({c, f, s});
    if (f > 1) targets.insert(f);
  }
  prob.targets.assign(targets.begin(), targets.end());
  for (std::uint64_t t : prob.targets)
    prob.max_width = std::max(prob.max_width, 64u - static_cast<unsigned>(
                                                        std::countl_zero(t)));
  return {prob, fixups};
}

// result = (u << u_shift) + (v << v_shift) for Add, minus for Sub; > 0.
struct McmOp {
  std::uint64_t result;
  std::uint64_t u, v;
  unsigned u_shift = 0, v_shift = 0;
  bool subtract = false;
};

struct McmSolution {
  std::vector<McmOp> ops;  // topologically ordered (operands precede uses)
};

enum class DigitRepresentation { Binary, Csd };

inline unsigned mas64(std::uint64_t t) { return ceil_log2(csd_nonzeros(t)); }

namespace detail {

// Drops ops whose result is not in the dependency cone of the targets.
inline void prune_solution(McmSolution& sol,
                           const std::vector<std::uint64_t>& targets) {
  std::unordered_set<std::uint64_t> needed(targets.begin(), targets.end());
  std::vector<McmOp> kept;
  for (auto it = sol.ops.rbegin(); it != sol.ops.rend(); ++it) {
    if (!needed.count(it->result)) continue;
    needed.insert(it->u);
    needed.insert(it->v);
    kept.push_back(*it);
  }
  std::reverse(kept.begin(), kept.end());
  sol.ops = std::move(kept);
}

// Signed digit positions of a value, most significant first.
inline std::vector<std::pair<unsigned, int>> digit_positions(
    std::uint64_t t, DigitRepresentation rep) {
  std::vector<std::pair<unsigned, int>> digits;
  if (rep == DigitRepresentation::Binary) {
    for (unsigned i = 0; i < 64; ++i)
      if ((t >> i) & 1) digits.push_back({i, 1});
  } else {
    CsdForm csd = to_csd(BigUint(t));
    for (unsigned i = 0; i < csd.digits.size(); ++i)
      if (csd.digits[i] != 0) digits.push_back({i, csd.digits[i]});
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

// Incremental reachability over odd fundamentals: `reached` holds everything
// obtainable by one A-operation from the ready set.
class ReachSet {
 public:
  ReachSet(unsigned max_width)
      : cap_(std::uint64_t{1} << (max_width + 1)),
        max_shift_(max_width + 1),
        bits_((cap_ / 2) / 64 + 1, 0) {}

  std::uint64_t cap() const { return cap_; }
  unsigned max_shift() const { return max_shift_; }

  bool reachable(std::uint64_t v) const {
    if (v > cap_ || (v & 1) == 0) return false;
    std::uint64_t i = v >> 1;
    return (bits_[i >> 6] >> (i & 63)) & 1;
  }

  const std::vector<std::uint64_t>& ready() const { return ready_; }
  bool in_ready(std::uint64_t v) const { return ready_set_.count(v) != 0; }

  unsigned ready_depth(std::uint64_t v) const {
    auto it = depth_.find(v);
    return it == depth_.end() ? 0 : it->second;
  }

  void add_ready(std::uint64_t r, unsigned depth = 0) {
    if (!ready_set_.insert(r).second) return;
    depth_[r] = depth;
    ready_.push_back(r);
    for (std::uint64_t v : ready_) {
      for (unsigned l = 1; l <= max_shift_; ++l) {
        std::uint64_t rl = r << l, vl = v << l;
        mark(rl + v);
        mark(rl > v ? rl - v : v - rl);
        mark(vl + r);
        mark(vl > r ? vl - r : r - vl);
      }
    }
  }

  // A-operation over the ready set producing c, preferring the shallowest
  // operands; ties resolve in a deterministic scan order.  Returns false if
  // c is not actually reachable.
  bool find_construction(std::uint64_t c, McmOp& op) const {
    std::vector<std::uint64_t> sorted = ready_;
    std::sort(sorted.begin(), sorted.end());
    bool found = false;
    unsigned best = ~0u;
    auto consider = [&](const McmOp& cand, std::uint64_t a, std::uint64_t b) {
      unsigned d = 1 + std::max(ready_depth(a), ready_depth(b));
      if (!found || d < best) {
        op = cand;
        best = d;
        found = true;
      }
    };
    for (std::uint64_t u : sorted)
      for (unsigned l = 1; l <= max_shift_; ++l) {
        std::uint64_t ul = u << l;
        if (ul > cap_ * 2) break;
        for (std::uint64_t v : sorted) {
          if (ul + v == c) consider({c, u, v, l, 0, false}, u, v);
          else if (ul > v && ul - v == c) consider({c, u, v, l, 0, true}, u, v);
          else if (v > ul && v - ul == c) consider({c, v, u, 0, l, true}, u, v);
        }
      }
    return found;
  }

 private:
  void mark(std::uint64_t w) {
    if (w == 0 || w > cap_ || (w & 1) == 0) return;
    std::uint64_t i = w >> 1;
    bits_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }

  std::uint64_t cap_;
  unsigned max_shift_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> ready_;
  std::unordered_set<std::uint64_t> ready_set_;
  std::unordered_map<std::uint64_t, unsigned> depth_;
};

// Candidate odd values c such that t becomes one A-operation away once c is
// ready, using `partner` as the other operand.
template <typename Fn>
inline void bridge_candidates(std::uint64_t t, std::uint64_t partner,
                              std::uint64_t cap, unsigned max_shift, Fn&& fn) {
  auto emit = [&](std::uint64_t c) {
    if (c > 1 && c <= cap && (c & 1)) fn(c);
  };
  for (unsigned l = 1; l <= max_shift; ++l) {
    std::uint64_t pl = partner << l;
    if (pl < (cap << 1)) {
      if (t > pl) emit(t - pl);        // t = c + (p<<l)
      if (pl > t) emit(pl - t);        // t = (p<<l) - c
      emit(t + pl);                    // t = c - (p<<l)
    }
    std::uint64_t d = t > partner ? t - partner : partner - t;
    if (d && (d & ((std::uint64_t{1} << l) - 1)) == 0)
      emit(d >> l);                    // t = (c<<l) +/- p
    std::uint64_t s = t + partner;
    if ((s & ((std::uint64_t{1} << l) - 1)) == 0)
      emit(s >> l);                    // t = (c<<l) - p
    // t = c * (2^l +/- 1)
    if (t % ((std::uint64_t{1} << l) + 1) == 0) emit(t / ((std::uint64_t{1} << l) + 1));
    if (l > 1 && t % ((std::uint64_t{1} << l) - 1) == 0)
      emit(t / ((std::uint64_t{1} << l) - 1));
  }
}

}  // namespace detail

// Digit-based recoding: one chain per target, most significant digit first.
inline McmSolution dbr(const McmProblem& prob, DigitRepresentation rep) {
  McmSolution sol;
  std::unordered_set<std::uint64_t> produced{1};
  for (std::uint64_t t : prob.targets) {
    auto digits = detail::digit_positions(t, rep);
    std::uint64_t acc = std::uint64_t{1} << digits[0].first;
    bool acc_is_input = true;  // acc is still just x shifted, not a produced op
    unsigned acc_shift = digits[0].first;
    for (std::size_t i = 1; i < digits.size(); ++i) {
      auto [pos, sign] = digits[i];
      std::uint64_t next = sign > 0 ? acc + (std::uint64_t{1} << pos)
                                    : acc - (std::uint64_t{1} << pos);
      if (!produced.count(next)) {
        if (acc_is_input)
          sol.ops.push_back({next, 1, 1, acc_shift, pos, sign < 0});
        else
          sol.ops.push_back({next, acc, 1, 0, pos, sign < 0});
        produced.insert(next);
      }
      acc = next;
      acc_is_input = false;
    }
  }
  detail::prune_solution(sol, prob.targets);
  return sol;
}

// Graph-based heuristic: grow a ready set, synthesizing reachable targets
// first, then bridging via single intermediates, then recursing on the
// closest signed-digit decomposition of the hardest target.  Falls back to
// the CSD recoding result when it does not improve on it.
inline McmSolution gb_heuristic(const McmProblem& prob) {
  if (prob.targets.empty()) return {};
  detail::ReachSet reach(prob.max_width);
  reach.add_ready(1);

  McmSolution sol;
  auto synthesize = [&](std::uint64_t c) {
    McmOp op;
    if (!reach.find_construction(c, op))
      throw SolverError("internal: value believed reachable is not");
    sol.ops.push_back(op);
    reach.add_ready(c, 1 + std::max(reach.ready_depth(op.u),
                                    reach.ready_depth(op.v)));
  };

  std::set<std::uint64_t> remaining(prob.targets.begin(), prob.targets.end());
  std::vector<std::uint64_t> subtargets;  // stack of helper values
  while (!remaining.empty() || !subtargets.empty()) {
    // Synthesize everything already one operation away.
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (auto it = remaining.begin(); it != remaining.end();) {
        if (reach.in_ready(*it)) {  // realized as a side effect
          it = remaining.erase(it);
          progressed = true;
          continue;
        }
        if (reach.reachable(*it)) {
          synthesize(*it);
          it = remaining.erase(it);
          progressed = true;
        } else {
          ++it;
        }
      }
      while (!subtargets.empty() && reach.reachable(subtargets.back())) {
        synthesize(subtargets.back());
        subtargets.pop_back();
        progressed = true;
      }
      subtargets.erase(
          std::remove_if(subtargets.begin(), subtargets.end(),
                         [&](std::uint64_t s) { return reach.in_ready(s); }),
          subtargets.end());
    }
    if (remaining.empty() && subtargets.empty()) break;

    // Bridge step: count, over all pending values, reachable intermediates
    // that leave them one operation away.
    std::map<std::uint64_t, unsigned> votes;
    auto vote_for = [&](std::uint64_t pending) {
      std::set<std::uint64_t> local;
      detail::bridge_candidates(pending, 1, reach.cap(), reach.max_shift(),
                                [&](std::uint64_t c) {
                                  if (reach.reachable(c) && !reach.in_ready(c))
                                    local.insert(c);
                                });
      for (std::uint64_t c : local) votes[c]++;
    };
    for (std::uint64_t t : remaining) vote_for(t);
    for (std::uint64_t s : subtargets) vote_for(s);
    if (!votes.empty()) {
      std::uint64_t best = 0;
      unsigned best_votes = 0;
      for (const auto& [c, n] : votes)
        if (n > best_votes) { best = c; best_votes = n; }
      synthesize(best);
      continue;
    }

    // Hardest pending value: most CSD digits, then smallest.
    std::uint64_t hardest = 0;
    if (!subtargets.empty()) {
      hardest = subtargets.back();
    } else {
      unsigned worst_nz = 0;
      for (std::uint64_t t : remaining) {
        unsigned nz = csd_nonzeros(t);
        if (nz > worst_nz || (nz == worst_nz && (hardest == 0 || t < hardest))) {
          worst_nz = nz;
          hardest = t;
        }
      }
    }
    // Best single-step helper toward it, over the whole ready set: prefer
    // reachable helpers, then fewer CSD digits, then smaller value.
    std::uint64_t best_c = 0;
    std::tuple<int, unsigned, std::uint64_t> best_key{2, ~0u, ~std::uint64_t{0}};
    std::vector<std::uint64_t> partners = reach.ready();
    std::sort(partners.begin(), partners.end());
    for (std::uint64_t r : partners) {
      detail::bridge_candidates(hardest, r, reach.cap(), reach.max_shift(),
                                [&](std::uint64_t c) {
        if (reach.in_ready(c)) return;
        if (std::find(subtargets.begin(), subtargets.end(), c) !=
            subtargets.end())
          return;
        std::tuple<int, unsigned, std::uint64_t> key{
            reach.reachable(c) ? 0 : 1, csd_nonzeros(c), c};
        if (key < best_key) { best_key = key; best_c = c; }
      });
    }
    if (best_c == 0)
      throw SolverError("heuristic found no decomposition step");
    if (reach.reachable(best_c)) {
      synthesize(best_c);
    } else {
      subtargets.push_back(best_c);
    }
  }
  detail::prune_solution(sol, prob.targets);

  McmSolution fallback = dbr(prob, DigitRepresentation::Csd);
  return fallback.ops.size() < sol.ops.size() ? fallback : sol;
}

// Breadth-first exact search over sets of odd fundamentals.  Minimal in the
// number of A-operations with left-shift-only operands.
inline McmSolution gb_exact_small(const McmProblem& prob) {
  if (prob.targets.empty()) return {};
  if (prob.max_width > 16)
    throw ConfigError("exact search supports targets up to 16 bits");
  McmSolution upper = gb_heuristic(prob);
  const std::size_t ubound = upper.ops.size();

  const std::uint64_t cap = std::uint64_t{1} << (prob.max_width + 1);
  const unsigned max_shift = prob.max_width + 1;
  const std::vector<std::uint64_t> targets = prob.targets;

  // Each operation at most doubles the attainable signed-digit weight, and
  // every target needs at least one operation of its own.
  std::size_t lower = targets.size();
  for (std::uint64_t t : targets)
    lower = std::max<std::size_t>(lower, ceil_log2(csd_nonzeros(t)));
  if (ubound <= lower) return upper;

  struct State {
    std::int32_t parent;
    std::uint64_t added;
    std::uint8_t size;
  };
  std::vector<State> states{{-1, 0, 0}};
  std::unordered_set<std::string> visited;
  std::deque<std::int32_t> queue{0};
  std::size_t explored = 0;

  auto collect = [&](std::int32_t id, std::vector<std::uint64_t>& out) {
    out.clear();
    for (std::int32_t s = id; s > 0; s = states[s].parent)
      out.push_back(states[s].added);
    out.push_back(1);
    std::sort(out.begin(), out.end());
  };

  std::vector<std::uint64_t> ready;
  while (!queue.empty()) {
    std::int32_t id = queue.front();
    queue.pop_front();
    if (++explored > prob.budget) throw BudgetExceeded(explored);
    collect(id, ready);
    std::size_t missing = 0;
    for (std::uint64_t t : targets)
      if (!std::binary_search(ready.begin(), ready.end(), t)) ++missing;
    if (missing == 0) {
      // First complete state in BFS order: minimal operation count.
      McmSolution sol;
      std::vector<std::uint64_t> sequence;
      for (std::int32_t s = id; s > 0; s = states[s].parent)
        sequence.push_back(states[s].added);
      std::reverse(sequence.begin(), sequence.end());
      detail::ReachSet reach(prob.max_width);
      reach.add_ready(1);
      for (std::uint64_t c : sequence) {
        McmOp op;
        if (!reach.find_construction(c, op))
          throw SolverError("internal: exact sequence not reconstructible");
        sol.ops.push_back(op);
        reach.add_ready(c, 1 + std::max(reach.ready_depth(op.u),
                                        reach.ready_depth(op.v)));
      }
      detail::prune_solution(sol, prob.targets);
      return sol;
    }
    if (states[id].size + missing >= ubound) continue;  // cannot beat the bound
    const std::size_t slack = ubound - states[id].size - missing;

    std::vector<std::uint64_t> extension;
    if (slack == 1) {
      // The last spare operation: only producing a missing target directly
      // can still beat the bound, so skip the full successor enumeration.
      for (std::uint64_t t : targets) {
        if (std::binary_search(ready.begin(), ready.end(), t)) continue;
        bool hit = false;
        for (std::uint64_t u : ready) {
          for (std::uint64_t v : ready) {
            for (unsigned l = 1; l <= max_shift && !hit; ++l) {
              std::uint64_t ul = u << l;
              if (ul + v == t || (ul > v ? ul - v : v - ul) == t) hit = true;
            }
            if (hit) break;
          }
          if (hit) break;
        }
        if (hit) extension.push_back(t);
      }
    } else {
      // Enumerate one-operation extensions.
      std::set<std::uint64_t> successors;
      for (std::uint64_t u : ready)
        for (std::uint64_t v : ready)
          for (unsigned l = 1; l <= max_shift; ++l) {
            std::uint64_t ul = u << l;
            std::uint64_t w1 = ul + v;
            std::uint64_t w2 = ul > v ? ul - v : v - ul;
            for (std::uint64_t w : {w1, w2})
              if (w > 1 && w <= cap && (w & 1) &&
                  !std::binary_search(ready.begin(), ready.end(), w))
                successors.insert(w);
          }
      // If a target is reachable, extending with it first loses nothing.
      for (std::uint64_t t : targets)
        if (successors.count(t)) extension.push_back(t);
      if (extension.empty())
        extension.assign(successors.begin(), successors.end());
    }

    for (std::uint64_t c : extension) {
      bool is_target =
          std::find(targets.begin(), targets.end(), c) != targets.end();
      std::size_t child_missing = missing - (is_target ? 1 : 0);
      // Prune at push: a child that cannot beat the bound never enters the
      // queue, which removes the widest BFS level entirely.
      if (states[id].size + 1 + child_missing >= ubound && child_missing != 0)
        continue;
      if (child_missing == 0 && states[id].size + 1 >= ubound) continue;
      std::vector<std::uint32_t> key_set(ready.begin(), ready.end());
      key_set.push_back(static_cast<std::uint32_t>(c));
      std::sort(key_set.begin(), key_set.end());
      std::string key(reinterpret_cast<const char*>(key_set.data()),
                      key_set.size() * sizeof(std::uint32_t));
      if (!visited.insert(std::move(key)).second) continue;
      // The budget bounds created states, not just expanded ones, so memory
      // stays proportional to the budget on explosive instances.
      if (states.size() >= prob.budget) throw BudgetExceeded(states.size());
      states.push_back({id, c, static_cast<std::uint8_t>(states[id].size + 1)});
      queue.push_back(static_cast<std::int32_t>(states.size() - 1));
    }
  }
  return upper;  // exhausted below the bound: the heuristic answer is optimal
}

// Delay-constrained heuristic: every emitted value satisfies depth <= D.
inline McmSolution gb_delay_constrained(const McmProblem& prob, unsigned delay_bound) {
  std::vector<BigUint> big;
  for (std::uint64_t t : prob.targets) big.push_back(BigUint(t));
  unsigned mas = min_adder_steps_set(big);
  if (delay_bound < mas)
    throw ConfigError("delay bound " + std::to_string(delay_bound) +
                      " below the minimum adder-steps " + std::to_string(mas));
  if (prob.targets.empty()) return {};

  const std::uint64_t cap = std::uint64_t{1} << (prob.max_width + 1);
  const unsigned max_shift = prob.max_width + 1;

  McmSolution sol;
  std::map<std::uint64_t, unsigned> depth{{1, 0}};       // ready set with depths
  std::map<std::uint64_t, unsigned> reach_depth;         // best one-op extension

  auto update_reach = [&](std::uint64_t r) {
    unsigned dr = depth.at(r);
    for (const auto& [v, dv] : depth) {
      unsigned d = 1 + std::max(dr, dv);
      if (d > delay_bound) continue;
      for (unsigned l = 1; l <= max_shift; ++l) {
        std::uint64_t rl = r << l, vl = v << l;
        for (std::uint64_t w : {rl + v, rl > v ? rl - v : v - rl,
                                vl + r, vl > r ? vl - r : r - vl}) {
          if (w <= 1 || w > cap || (w & 1) == 0) continue;
          auto it = reach_depth.find(w);
          if (it == reach_depth.end() || it->second > d) reach_depth[w] = d;
        }
      }
    }
  };
  update_reach(1);

  auto find_construction = [&](std::uint64_t c, unsigned want_depth) -> McmOp {
    for (const auto& [u, du] : depth)
      for (const auto& [v, dv] : depth) {
        if (1 + std::max(du, dv) > want_depth) continue;
        for (unsigned l = 1; l <= max_shift; ++l) {
          std::uint64_t ul = u << l;
          if (ul + v == c) return {c, u, v, l, 0, false};
          if (ul > v && ul - v == c) return {c, u, v, l, 0, true};
          if (v > ul && v - ul == c) return {c, v, u, 0, l, true};
        }
      }
    throw SolverError("internal: no depth-feasible construction found");
  };

  auto synthesize = [&](std::uint64_t c) {
    unsigned d = reach_depth.at(c);
    sol.ops.push_back(find_construction(c, d));
    depth[c] = d;
    update_reach(c);
  };

  // Near-balanced CSD tree: realizes t within mas(t) adder-steps when no
  // value collisions occur.  The two shallowest terms are merged each round,
  // and the partner is chosen so a value already realized at a greater depth
  // is never silently reused (which would break the depth bound).
  auto realize_balanced = [&](std::uint64_t t) {
    struct Item {
      std::uint64_t fund;
      unsigned shift;
      int sign;
      unsigned depth;
    };
    std::vector<Item> items;
    CsdForm csd = to_csd(BigUint(t));
    for (unsigned i = 0; i < csd.digits.size(); ++i)
      if (csd.digits[i] != 0) items.push_back({1, i, csd.digits[i], 0});
    auto merged_value = [](const Item& lo, const Item& hi) {
      unsigned rel = hi.shift - lo.shift;
      return std::int64_t(lo.sign) * std::int64_t(lo.fund) +
             std::int64_t(hi.sign) * std::int64_t(hi.fund << rel);
    };
    auto merged_depth = [&](const Item& a, const Item& b, std::uint64_t fund) {
      unsigned fresh = 1 + std::max(a.depth, b.depth);
      auto it = depth.find(fund);
      return it == depth.end() ? fresh : std::min(fresh, it->second);
    };
    while (items.size() > 1) {
      std::stable_sort(items.begin(), items.end(),
                       [](const Item& x, const Item& y) {
                         return x.depth < y.depth;
                       });
      std::size_t pick = 1;
      unsigned best_d = ~0u;
      for (std::size_t j = 1; j < items.size(); ++j) {
        const Item& lo = items[0].shift <= items[j].shift ? items[0] : items[j];
        const Item& hi = items[0].shift <= items[j].shift ? items[j] : items[0];
        std::uint64_t fund =
            std::uint64_t(std::llabs(merged_value(lo, hi)));
        unsigned d = merged_depth(items[0], items[j], fund);
        if (d < best_d) { best_d = d; pick = j; }
      }
      const Item& lo =
          items[0].shift <= items[pick].shift ? items[0] : items[pick];
      const Item& hi =
          items[0].shift <= items[pick].shift ? items[pick] : items[0];
      unsigned rel = hi.shift - lo.shift;
      std::int64_t signed_val = merged_value(lo, hi);
      std::uint64_t fund = std::uint64_t(std::llabs(signed_val));
      int sign = signed_val < 0 ? -1 : 1;
      unsigned d = merged_depth(items[0], items[pick], fund);
      if (!depth.count(fund)) {
        bool same_sign = lo.sign == hi.sign;
        std::uint64_t hv = hi.fund << rel;
        McmOp op;
        if (same_sign) op = {fund, hi.fund, lo.fund, rel, 0, false};
        else if (hv > lo.fund) op = {fund, hi.fund, lo.fund, rel, 0, true};
        else op = {fund, lo.fund, hi.fund, 0, rel, true};
        sol.ops.push_back(op);
        depth[fund] = d;
        update_reach(fund);
      }
      Item merged{fund, lo.shift, sign, d};
      items.erase(items.begin() + pick);
      items.erase(items.begin());
      items.push_back(merged);
    }
  };

  std::set<std::uint64_t> remaining(prob.targets.begin(), prob.targets.end());
  while (!remaining.empty()) {
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (auto it = remaining.begin(); it != remaining.end();) {
        if (depth.count(*it)) {  // realized as a side effect
          it = remaining.erase(it);
          progressed = true;
          continue;
        }
        auto rd = reach_depth.find(*it);
        if (rd != reach_depth.end() && rd->second <= delay_bound) {
          synthesize(*it);
          it = remaining.erase(it);
          progressed = true;
        } else {
          ++it;
        }
      }
    }
    if (remaining.empty()) break;

    // Bridge with depth headroom for the final operation.
    std::map<std::uint64_t, unsigned> votes;
    for (std::uint64_t t : remaining) {
      std::set<std::uint64_t> local;
      detail::bridge_candidates(t, 1, cap, max_shift, [&](std::uint64_t c) {
        auto rd = reach_depth.find(c);
        if (rd == reach_depth.end() || depth.count(c)) return;
        if (rd->second + 1 <= delay_bound) local.insert(c);
      });
      for (std::uint64_t c : local) votes[c]++;
    }
    if (!votes.empty()) {
      std::uint64_t best = 0;
      unsigned best_votes = 0;
      for (const auto& [c, n] : votes)
        if (n > best_votes) { best = c; best_votes = n; }
      synthesize(best);
      continue;
    }

    // Guaranteed-feasible fallback: balanced CSD tree for the hardest value.
    std::uint64_t hardest = 0;
    unsigned worst_nz = 0;
    for (std::uint64_t t : remaining) {
      unsigned nz = csd_nonzeros(t);
      if (nz > worst_nz) { worst_nz = nz; hardest = t; }
    }
    realize_balanced(hardest);
    if (!depth.count(hardest) || depth.at(hardest) > delay_bound)
      throw SolverError("internal: balanced realization violated the bound");
    remaining.erase(hardest);
  }
  detail::prune_solution(sol, prob.targets);
  return sol;
}

// Materializes solver ops into the shared graph; value_to_node accumulates
// the value -> node mapping (1 maps to the input node).
inline void apply_solution(AdderGraph& graph, const McmSolution& sol,
                           std::map<std::uint64_t, std::uint32_t>& value_to_node) {
  value_to_node.emplace(1, graph.input_node());
  for (const McmOp& op : sol.ops) {
    auto u = value_to_node.find(op.u);
    auto v = value_to_node.find(op.v);
    if (u == value_to_node.end() || v == value_to_node.end())
      throw SolverError("solution references an unrealized operand");
    std::uint32_t id = graph.add_node(op.subtract ? NodeOp::Sub : NodeOp::Add,
                                      u->second, op.u_shift, v->second,
                                      op.v_shift);
    value_to_node[op.result] = id;
  }
}

}  // namespace vlcm
