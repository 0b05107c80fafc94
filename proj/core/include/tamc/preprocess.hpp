#pragma once

#include <string>
#include <vector>

#include "tamc/automaton.hpp"
#include "tamc/smt/solver.hpp"

namespace tamc {

struct PreprocessOptions {
  /// Step 3: delete rules whose guard is unsatisfiable under RC for all
  /// shared values >= 0. Off by default.
  bool prune_unsat_guards = false;
};

struct PreprocessReport {
  int self_loops_removed = 0;
  int conjuncts_simplified = 0;
  int unsat_guard_rules_removed = 0;
  int locations_removed = 0;
  int rules_removed_with_locations = 0;
  std::vector<std::string> notes;

  bool changed() const {
    return self_loops_removed || conjuncts_simplified || unsat_guard_rules_removed ||
           locations_removed || rules_removed_with_locations;
  }
};

struct PreprocessResult {
  ThresholdAutomaton automaton;  // simplified; holds exactly the checked spec
  PreprocessReport report;
};

/// Static simplification of (automaton, spec), preserving the spec verdict:
/// (1) removes self-loops without effect on the variables, (2) replaces by
/// `true` guard conjuncts that hold under RC for every shared value >= 0,
/// (3) optionally deletes rules with RC-unsatisfiable guards, (4) removes
/// locations that are unreachable in the location graph from the initial
/// locations permitted by the spec's initial restriction. Locations named in
/// the spec are never removed; a note records when that protection fires.
PreprocessResult simplify(const ThresholdAutomaton& ta, const SafetySpec& spec,
                          const PreprocessOptions& options, smt::SolverSession& session);

}  // namespace tamc
