#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tamc/abstraction.hpp"
#include "tamc/smt/solver.hpp"
#include "tamc/verdict.hpp"

namespace tamc {

/// Annotation of one path node: abstract shared values plus, depending on
/// the checker, location emptiness bits (ZCS) or count lower bounds (ACS).
struct NodeAnnotation {
  std::vector<int> abstract;             // per shared var: interval index
  std::vector<int> bits;                 // per location 0/1; empty = unconstrained
  std::vector<std::int64_t> min_counts;  // per location; empty = unconstrained
};

/// Incremental feasibility query for an abstract error path. One abstract
/// step concretizes to a block of >= 1 identical firings of one rule;
/// reset/decrement rules are restricted to single firings. The query asserts
/// exact concrete semantics (flow, non-negativity, per-firing guard truth)
/// plus the path's interval annotations at every boundary, so a satisfying
/// model is a real run and converts directly to a Trace.
class PathQuery {
 public:
  /// Asserts parameters >= 0, RC, realization of the order, and the initial
  /// node: g = 0, counts supported on the initial locations, init
  /// constraints, the spec's initial restriction, and initial annotations.
  PathQuery(const IntervalTa& ita, const SafetySpec& spec, smt::SolverSession& session,
            const NodeAnnotation& initial);

  /// Appends one abstract step inside a fresh solver frame.
  void push_step(int rule_index, const NodeAnnotation& post);
  void pop_step();
  int length() const { return (int)steps_.size(); }

  /// Feasibility of the current prefix.
  smt::SmtResult check();

  /// Feasibility of the current prefix extended with the spec's error
  /// condition at the final node (asserted in a transient frame).
  smt::SmtResult check_with_error();

  /// Converts a satisfying model of check_with_error into a trace.
  Trace trace_from_model(const smt::SmtResult& sat) const;

 private:
  smt::TermRef count_var(int node, int loc) const;
  smt::TermRef shared_var(int node, int var) const;
  smt::TermRef block_var(int step) const;
  void declare_node_vars(int node);
  void assert_node_annotation(int node, const NodeAnnotation& a);
  void assert_interval_member(smt::TermRef g, int var, int interval);

  const IntervalTa& ita_;
  const SafetySpec& spec_;
  smt::SolverSession& session_;
  std::vector<smt::TermRef> params_;
  std::vector<smt::TermRef> ceils_;  // per threshold, aligned with the order
  std::vector<int> steps_;           // rule index per step
};

}  // namespace tamc
