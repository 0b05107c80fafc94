#pragma once

#include "tamc/automaton.hpp"
#include "tamc/smt/solver.hpp"
#include "tamc/verdict.hpp"

namespace tamc {

struct ZcsOptions {
  std::int64_t max_path_len = 0;        // 0: 10 * |L| * max interval count
  std::int64_t max_expansions = 200000; // search-node guard per order
  int jobs = 1;
};

/// 01-counter-system checker: per threshold order, abstracts the automaton
/// to location-emptiness bits plus abstract shared values, explores
/// backwards from the abstract error states with BDDs, then enumerates
/// abstract error paths breadth-first and refutes or concretizes each with
/// one linear feasibility query. Complete for MTA; a semi-decision procedure
/// for ETA (budget exhaustion yields UNKNOWN, never an unsound SAFE).
Verdict zcs_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  const smt::SessionFactory& sessions, const ZcsOptions& options = {});

}  // namespace tamc
