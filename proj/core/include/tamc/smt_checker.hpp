#pragma once

#include "tamc/automaton.hpp"
#include "tamc/smt/solver.hpp"
#include "tamc/verdict.hpp"

namespace tamc {

/// Decides parameterized safety for an MTA by one existential linear
/// arithmetic query over steady path segments: K = (#distinct guard atoms)+1
/// segments, each a multiset of rule firings with flow, non-negativity,
/// guard and executability constraints. Unsat means safe; a model is turned
/// into a trace by scheduling each segment's firing counts.
///
/// Throws std::invalid_argument for an ETA (the encoding relies on guard
/// monotonicity).
Verdict smt_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  smt::SolverSession& session);

}  // namespace tamc
