#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tamc/guard.hpp"

namespace tamc {

/// Atomic constraint on the process count of one location.
/// Ge with bound >= 1 and Eq0 are the specification-side atoms; Le appears
/// only in derived error conditions (negation of Ge c yields Le c-1).
struct CountAtom {
  enum class Kind { Ge, Eq0, Le };
  Kind kind = Kind::Ge;
  int loc = 0;
  std::int64_t bound = 1;  // unused for Eq0

  bool eval(std::span<const std::int64_t> counts) const {
    switch (kind) {
      case Kind::Ge: return counts[loc] >= bound;
      case Kind::Eq0: return counts[loc] == 0;
      case Kind::Le: return counts[loc] <= bound;
    }
    return false;
  }

  friend bool operator==(const CountAtom&, const CountAtom&) = default;
};

/// Positive boolean combination (and/or) over count atoms.
struct CountFormula {
  enum class Op { True, False, Atom, And, Or };
  Op op = Op::True;
  CountAtom atom;
  std::vector<CountFormula> children;

  static CountFormula make_true() { return CountFormula{}; }
  static CountFormula make_false() { return CountFormula{Op::False, {}, {}}; }
  static CountFormula make_atom(CountAtom a) { return CountFormula{Op::Atom, a, {}}; }
  static CountFormula make_and(std::vector<CountFormula> cs) {
    return CountFormula{Op::And, {}, std::move(cs)};
  }
  static CountFormula make_or(std::vector<CountFormula> cs) {
    return CountFormula{Op::Or, {}, std::move(cs)};
  }

  bool eval(std::span<const std::int64_t> counts) const;

  /// Negation with De Morgan push-down to atoms:
  /// !(k >= c) -> k <= c-1 (k = 0 when c = 1), !(k = 0) -> k >= 1, !(k <= b) -> k >= b+1.
  CountFormula negated() const;

  /// True if any atom is Eq0 or Le (the emptiness-style targets the ACS
  /// checker does not support).
  bool has_emptiness_atom() const;

  void collect_locations(std::vector<int>& out) const;
};

/// Boolean combination over guard atoms; negation is absorbed into the atoms
/// (Lower and Upper are each other's duals), so the tree has and/or only.
struct GuardFormula {
  enum class Op { True, False, Atom, And, Or };
  Op op = Op::True;
  GuardAtom atom;
  std::vector<GuardFormula> children;

  static GuardFormula make_true() { return GuardFormula{}; }
  static GuardFormula make_false() { return GuardFormula{Op::False, {}, {}}; }
  static GuardFormula make_atom(GuardAtom a) { return GuardFormula{Op::Atom, a, {}}; }
  static GuardFormula make_and(std::vector<GuardFormula> cs) {
    return GuardFormula{Op::And, {}, std::move(cs)};
  }
  static GuardFormula make_or(std::vector<GuardFormula> cs) {
    return GuardFormula{Op::Or, {}, std::move(cs)};
  }

  bool eval(std::span<const std::int64_t> shared, std::span<const std::int64_t> params) const;
  GuardFormula negated() const;
  void collect_atoms(std::vector<GuardAtom>& out) const;
};

/// One conjunct of a normalized safety body: gform \/ cform, where the guard
/// part may be absent (pure count formula).
struct Pform {
  std::optional<GuardFormula> gform;
  CountFormula cform;

  bool eval(std::span<const std::int64_t> counts, std::span<const std::int64_t> shared,
            std::span<const std::int64_t> params) const {
    if (gform && gform->eval(shared, params)) return true;
    return cform.eval(counts);
  }
};

/// A normalized safety specification: optional initial-state restriction
/// (left side of a top-level implication) and a body [](/\ pform_i).
struct SafetySpec {
  std::string name;
  std::optional<CountFormula> init_restriction;
  std::vector<Pform> body;

  bool body_eval(std::span<const std::int64_t> counts, std::span<const std::int64_t> shared,
                 std::span<const std::int64_t> params) const {
    for (const auto& p : body)
      if (!p.eval(counts, shared, params)) return false;
    return true;
  }
};

/// The negated body with negation pushed to atoms. A configuration is an
/// error configuration iff some disjunct holds in it.
struct ErrorCondition {
  struct Disjunct {
    GuardFormula guard;  // negation of the pform's gform (True when absent)
    CountFormula count;  // negation of the pform's cform
  };
  std::vector<Disjunct> disjuncts;

  bool eval(std::span<const std::int64_t> counts, std::span<const std::int64_t> shared,
            std::span<const std::int64_t> params) const {
    for (const auto& d : disjuncts)
      if (d.guard.eval(shared, params) && d.count.eval(counts)) return true;
    return false;
  }

  /// Whether any count part contains an Eq0 or Le atom; such error conditions
  /// require target locations to be empty and are rejected by the ACS checker.
  bool has_emptiness_atom() const {
    for (const auto& d : disjuncts)
      if (d.count.has_emptiness_atom()) return true;
    return false;
  }
};

ErrorCondition error_condition(const SafetySpec& spec);

/// Whether some natural count vector satisfies the positive formula subject
/// to per-location lower bounds and forced-zero locations.
bool count_formula_satisfiable(const CountFormula& f,
                               const std::map<int, std::int64_t>& forced_min,
                               const std::set<int>& forced_zero);

}  // namespace tamc
