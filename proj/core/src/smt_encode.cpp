#include "tamc/smt/encode.hpp"

#include <numeric>

namespace tamc::smt {

TermRef constraint_term(const LinearConstraint& c, const SymbolTerms& syms) {
  std::int64_t scale = c.constant.den();
  for (const auto& t : c.terms) scale = std::lcm(scale, t.coeff.den());
  std::vector<TermRef> parts;
  for (const auto& t : c.terms) {
    Rational k = t.coeff * Rational(scale);
    parts.push_back(mul(k.num(), syms(t.sym, t.index)));
  }
  Rational k0 = c.constant * Rational(scale);
  if (!k0.is_zero()) parts.push_back(lit(k0.num()));
  TermRef lhs = add(std::move(parts));
  return c.rel == LinearConstraint::Rel::Eq ? eq(lhs, lit(0)) : ge(lhs, lit(0));
}

std::pair<std::int64_t, TermRef> scaled_expr_term(const LinearExpr& e, const SymbolTerms& syms) {
  std::int64_t scale = e.scale();
  std::vector<TermRef> parts;
  for (const auto& [idx, coeff] : e.coeffs()) {
    Rational k = coeff * Rational(scale);
    parts.push_back(mul(k.num(), syms(SymKind::Param, idx)));
  }
  Rational k0 = e.constant() * Rational(scale);
  if (!k0.is_zero()) parts.push_back(lit(k0.num()));
  return {scale, add(std::move(parts))};
}

TermRef guard_atom_term(const GuardAtom& atom, const TermRef& var_term, const SymbolTerms& syms) {
  auto [scale, num] = scaled_expr_term(atom.threshold, syms);
  TermRef scaled_var = mul(scale, var_term);
  if (atom.kind == GuardKind::Lower) return ge(scaled_var, num);
  return le(scaled_var, add({num, lit(-1)}));
}

TermRef guard_term(const Guard& g, const std::vector<TermRef>& shared_terms,
                   const SymbolTerms& syms) {
  std::vector<TermRef> parts;
  for (const auto& atom : g.conjuncts)
    parts.push_back(guard_atom_term(atom, shared_terms[atom.var], syms));
  return land(std::move(parts));
}

TermRef guard_formula_term(const GuardFormula& f, const std::vector<TermRef>& shared_terms,
                           const SymbolTerms& syms) {
  switch (f.op) {
    case GuardFormula::Op::True: return tru();
    case GuardFormula::Op::False: return fls();
    case GuardFormula::Op::Atom:
      return guard_atom_term(f.atom, shared_terms[f.atom.var], syms);
    case GuardFormula::Op::And:
    case GuardFormula::Op::Or: {
      std::vector<TermRef> parts;
      for (const auto& c : f.children)
        parts.push_back(guard_formula_term(c, shared_terms, syms));
      return f.op == GuardFormula::Op::And ? land(std::move(parts)) : lor(std::move(parts));
    }
  }
  return fls();
}

TermRef count_formula_term(const CountFormula& f, const std::vector<TermRef>& count_terms) {
  switch (f.op) {
    case CountFormula::Op::True: return tru();
    case CountFormula::Op::False: return fls();
    case CountFormula::Op::Atom: {
      const TermRef& k = count_terms[f.atom.loc];
      switch (f.atom.kind) {
        case CountAtom::Kind::Ge: return ge(k, lit(f.atom.bound));
        case CountAtom::Kind::Eq0: return eq(k, lit(0));
        case CountAtom::Kind::Le: return le(k, lit(f.atom.bound));
      }
      return fls();
    }
    case CountFormula::Op::And:
    case CountFormula::Op::Or: {
      std::vector<TermRef> parts;
      for (const auto& c : f.children) parts.push_back(count_formula_term(c, count_terms));
      return f.op == CountFormula::Op::And ? land(std::move(parts)) : lor(std::move(parts));
    }
  }
  return fls();
}

}  // namespace tamc::smt
