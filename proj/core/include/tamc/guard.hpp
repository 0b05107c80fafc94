#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tamc/linear_expr.hpp"

namespace tamc {

enum class GuardKind {
  Lower,  // threshold <= var
  Upper,  // threshold >  var
};

/// One atomic guard comparing a threshold expression against a shared
/// variable (by index into the automaton's shared list).
struct GuardAtom {
  GuardKind kind = GuardKind::Lower;
  LinearExpr threshold;
  int var = 0;

  bool eval(std::span<const std::int64_t> shared, std::span<const std::int64_t> params) const {
    Rational t = threshold.eval(params);
    Rational x{shared[var]};
    return kind == GuardKind::Lower ? t <= x : t > x;
  }

  /// The atom with the opposite truth value: !(t <= x) is t > x and vice versa.
  GuardAtom negated() const {
    return GuardAtom{kind == GuardKind::Lower ? GuardKind::Upper : GuardKind::Lower, threshold,
                     var};
  }

  friend bool operator==(const GuardAtom& a, const GuardAtom& b) {
    return a.kind == b.kind && a.var == b.var && a.threshold == b.threshold;
  }
  friend bool operator<(const GuardAtom& a, const GuardAtom& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.var != b.var) return a.var < b.var;
    return a.threshold < b.threshold;
  }
};

/// Conjunction of atomic guards; the empty conjunction is `true`.
struct Guard {
  std::vector<GuardAtom> conjuncts;

  bool is_true() const { return conjuncts.empty(); }

  bool eval(std::span<const std::int64_t> shared, std::span<const std::int64_t> params) const {
    for (const auto& atom : conjuncts)
      if (!atom.eval(shared, params)) return false;
    return true;
  }

  friend bool operator==(const Guard& a, const Guard& b) { return a.conjuncts == b.conjuncts; }
};

}  // namespace tamc
