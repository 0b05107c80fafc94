#pragma once

#include <functional>

#include "tamc/automaton.hpp"
#include "tamc/smt/term.hpp"

namespace tamc::smt {

/// Maps a typed automaton symbol to the solver term standing for it.
using SymbolTerms = std::function<TermRef(SymKind, int)>;

/// sum(coeff*sym) + constant REL 0, denominators cleared.
TermRef constraint_term(const LinearConstraint& c, const SymbolTerms& syms);

/// The threshold expression scaled to integers: returns (scale, term) with
/// term = scale * expr over the parameter terms.
std::pair<std::int64_t, TermRef> scaled_expr_term(const LinearExpr& e, const SymbolTerms& syms);

/// Guard atom truth as a linear constraint over an integer-valued variable
/// term: Lower(e, x) is scale*x >= num(e); Upper(e, x) is scale*x <= num(e)-1.
TermRef guard_atom_term(const GuardAtom& atom, const TermRef& var_term, const SymbolTerms& syms);

TermRef guard_term(const Guard& g, const std::vector<TermRef>& shared_terms,
                   const SymbolTerms& syms);

TermRef guard_formula_term(const GuardFormula& f, const std::vector<TermRef>& shared_terms,
                           const SymbolTerms& syms);

TermRef count_formula_term(const CountFormula& f, const std::vector<TermRef>& count_terms);

}  // namespace tamc::smt
