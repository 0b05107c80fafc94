#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tamc/guard.hpp"
#include "tamc/spec_formula.hpp"

namespace tamc {

enum class AutomatonKind { Mta, Eta };

enum class SymKind { Loc, Shared, Param };

/// Linear constraint over location counts, shared variables and parameters,
/// normalized to  sum(coeff * sym) + constant REL 0  with REL in {==, >=}.
/// Strict inequalities over integer-valued terms are absorbed into the
/// constant during construction.
struct LinearConstraint {
  struct Term {
    SymKind sym = SymKind::Param;
    int index = 0;
    Rational coeff;
  };
  enum class Rel { Eq, Ge };

  std::vector<Term> terms;
  Rational constant;
  Rel rel = Rel::Ge;

  bool references(SymKind kind) const {
    for (const auto& t : terms)
      if (t.sym == kind) return true;
    return false;
  }

  bool eval(std::span<const std::int64_t> counts, std::span<const std::int64_t> shared,
            std::span<const std::int64_t> params) const {
    Rational acc = constant;
    for (const auto& t : terms) {
      std::int64_t v = 0;
      switch (t.sym) {
        case SymKind::Loc: v = counts[t.index]; break;
        case SymKind::Shared: v = shared[t.index]; break;
        case SymKind::Param: v = params[t.index]; break;
      }
      acc = acc + t.coeff * Rational(v);
    }
    return rel == Rel::Eq ? acc == Rational(0) : acc >= Rational(0);
  }
};

/// A rule moves one process from `from` to `to`, guarded by a conjunction of
/// threshold comparisons. Updates are per-shared-variable increments
/// (non-negative for MTA); `resets` lists variables set to 0 by the firing.
struct Rule {
  int id = 0;
  int from = 0;
  int to = 0;
  Guard guard;
  std::vector<std::int64_t> updates;
  std::set<int> resets;

  bool is_monotonic() const {
    if (!resets.empty()) return false;
    for (auto u : updates)
      if (u < 0) return false;
    return true;
  }
};

struct ThresholdAutomaton {
  std::string name;
  AutomatonKind kind = AutomatonKind::Mta;
  std::vector<std::string> locations;
  std::vector<int> initial;  // indices into locations, ascending
  std::vector<std::string> shared;
  std::vector<std::string> params;
  std::vector<LinearConstraint> resilience;
  std::vector<LinearConstraint> init_constraints;
  std::vector<Rule> rules;
  std::vector<SafetySpec> specs;

  std::optional<int> location_index(const std::string& n) const;
  std::optional<int> shared_index(const std::string& n) const;
  std::optional<int> param_index(const std::string& n) const;
  const SafetySpec* find_spec(const std::string& n) const;

  /// Rules keep their input-file ids across preprocessing; traces reference
  /// rules by id, not position.
  const Rule* find_rule(int id) const;

  bool is_initial_location(int loc) const {
    for (int i : initial)
      if (i == loc) return true;
    return false;
  }

  /// Structural well-formedness; returns a description of the first
  /// violation, or nullopt when the automaton satisfies all invariants.
  std::optional<std::string> validate() const;

  /// All distinct threshold expressions occurring in rule guards and in
  /// guard atoms of specification formulas, in first-occurrence order.
  std::vector<LinearExpr> thresholds() const;

  /// Distinct guard atoms of all rules, in first-occurrence order.
  std::vector<GuardAtom> distinct_rule_atoms() const;
};

}  // namespace tamc
