#pragma once

#include <string>
#include <vector>

#include "tamc/automaton.hpp"
#include "tamc/smt/solver.hpp"

namespace tamc {

/// A total preorder over {0} and the automaton's thresholds, realizable by
/// some parameter valuation satisfying RC.
///
/// Because shared variables range over naturals, a threshold expression t
/// behaves exactly like max(0, ceil(t)): guards compare integers against it
/// from below (t <= x) or above (t > x). Orders therefore partition
/// thresholds by that clamped ceiling. Block 0 is the block of value 0;
/// blocks are numbered ascending by value.
struct ThresholdOrder {
  std::vector<LinearExpr> thresholds;  // deduplicated, first-occurrence order
  std::vector<int> block_of;           // per threshold: block id (0-based)
  int num_blocks = 1;
  std::vector<std::int64_t> witness;   // realizes exactly this order

  /// Some threshold placed in block k >= 1 (they are all equal under the
  /// order); used to materialize interval boundaries in queries.
  int representative(int block) const {
    for (std::size_t i = 0; i < block_of.size(); ++i)
      if (block_of[i] == block) return (int)i;
    return -1;
  }

  int block_of_expr(const LinearExpr& e) const {
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (thresholds[i] == e) return block_of[i];
    return -1;
  }

  int index_of_expr(const LinearExpr& e) const {
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (thresholds[i] == e) return (int)i;
    return -1;
  }

  /// Equality ignores the witness.
  friend bool operator==(const ThresholdOrder& a, const ThresholdOrder& b) {
    return a.thresholds == b.thresholds && a.block_of == b.block_of &&
           a.num_blocks == b.num_blocks;
  }

  std::string str(const ThresholdAutomaton& ta) const;
};

/// The order induced by a concrete valuation (brute-force side of the
/// enumeration; also the oracle for order soundness tests).
ThresholdOrder induced_order(std::vector<LinearExpr> thresholds,
                             std::vector<std::int64_t> params);

struct OrderEnumeration {
  std::vector<ThresholdOrder> orders;
  bool rc_unsat = false;  // no valuation satisfies RC: vacuously safe
  bool unknown = false;
  std::string info;
};

/// Computes all threshold orders feasible under RC by model enumeration:
/// repeatedly asks the solver for a valuation not yet covered, reads off the
/// induced order, and blocks it.
OrderEnumeration enumerate_orders(const ThresholdAutomaton& ta, smt::SolverSession& session);

/// Declares one ceiling variable per threshold (named prefix + index),
/// asserts their defining constraints over the given parameter terms, and
/// asserts that the parameters realize exactly this order. Returns the
/// ceiling variable terms, aligned with order.thresholds.
std::vector<smt::TermRef> assert_order_realized(smt::SolverSession& session,
                                                const ThresholdOrder& order,
                                                const std::vector<smt::TermRef>& param_terms,
                                                const std::string& prefix);

/// The finite-domain automaton induced by a threshold order: each shared
/// variable ranges over the intervals between consecutive boundary blocks.
struct IntervalTa {
  const ThresholdAutomaton* ta = nullptr;
  ThresholdOrder order;
  // Per shared variable: ascending global block ids; entry 0 is block 0, so
  // interval j of variable v is [boundary j, boundary j+1).
  std::vector<std::vector<int>> var_boundaries;

  int num_intervals(int var) const { return (int)var_boundaries[var].size(); }

  /// Local boundary index of a guard threshold for the given variable, or 0
  /// when the threshold's block clamps to 0.
  int local_boundary(int var, const LinearExpr& threshold) const;

  bool atom_true(const GuardAtom& atom, std::span<const int> abstract) const;
  bool guard_true(const Guard& g, std::span<const int> abstract) const;
  bool gform_true(const GuardFormula& f, std::span<const int> abstract) const;

  /// Abstract value of a concrete shared value under the witness (or any)
  /// valuation: the interval index of min-clamped value.
  int abstract_of(int var, std::int64_t value, std::span<const std::int64_t> params) const;

  /// Range [lo, hi] of abstract successor values of variable `var` when the
  /// rule fires once from abstract value `a`: resets go to 0, an increment
  /// by u may stay or advance at most u intervals, a decrement mirrors that.
  std::pair<int, int> lift_range(const Rule& rule, int var, int a) const;
};

IntervalTa build_interval_ta(const ThresholdAutomaton& ta, ThresholdOrder order);

}  // namespace tamc
