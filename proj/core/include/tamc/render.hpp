#pragma once

#include <string>

#include "tamc/automaton.hpp"

namespace tamc {

/// Emits `.ta` text that re-parses to a semantically identical automaton.
/// Requires every threshold and constraint coefficient to be integral (true
/// for every automaton produced by the parser; the file grammar has integer
/// literals only).
std::string render(const ThresholdAutomaton& ta);

std::string render_guard(const ThresholdAutomaton& ta, const Guard& guard);
std::string render_count_formula(const ThresholdAutomaton& ta, const CountFormula& f);
std::string render_guard_formula(const ThresholdAutomaton& ta, const GuardFormula& f);

}  // namespace tamc
