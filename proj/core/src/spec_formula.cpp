#include "tamc/spec_formula.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace tamc {

bool CountFormula::eval(std::span<const std::int64_t> counts) const {
  switch (op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return atom.eval(counts);
    case Op::And:
      for (const auto& c : children)
        if (!c.eval(counts)) return false;
      return true;
    case Op::Or:
      for (const auto& c : children)
        if (c.eval(counts)) return true;
      return false;
  }
  return false;
}

CountFormula CountFormula::negated() const {
  switch (op) {
    case Op::True: return make_false();
    case Op::False: return make_true();
    case Op::Atom: {
      CountAtom a = atom;
      switch (atom.kind) {
        case CountAtom::Kind::Ge:
          if (atom.bound <= 1) {
            a.kind = CountAtom::Kind::Eq0;
            a.bound = 1;
          } else {
            a.kind = CountAtom::Kind::Le;
            a.bound = atom.bound - 1;
          }
          break;
        case CountAtom::Kind::Eq0:
          a.kind = CountAtom::Kind::Ge;
          a.bound = 1;
          break;
        case CountAtom::Kind::Le:
          a.kind = CountAtom::Kind::Ge;
          a.bound = atom.bound + 1;
          break;
      }
      return make_atom(a);
    }
    case Op::And:
    case Op::Or: {
      std::vector<CountFormula> neg;
      neg.reserve(children.size());
      for (const auto& c : children) neg.push_back(c.negated());
      return op == Op::And ? make_or(std::move(neg)) : make_and(std::move(neg));
    }
  }
  return make_false();
}

bool CountFormula::has_emptiness_atom() const {
  switch (op) {
    case Op::Atom:
      return atom.kind == CountAtom::Kind::Eq0 || atom.kind == CountAtom::Kind::Le;
    case Op::And:
    case Op::Or:
      for (const auto& c : children)
        if (c.has_emptiness_atom()) return true;
      return false;
    default: return false;
  }
}

void CountFormula::collect_locations(std::vector<int>& out) const {
  if (op == Op::Atom) out.push_back(atom.loc);
  for (const auto& c : children) c.collect_locations(out);
}

bool GuardFormula::eval(std::span<const std::int64_t> shared,
                        std::span<const std::int64_t> params) const {
  switch (op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return atom.eval(shared, params);
    case Op::And:
      for (const auto& c : children)
        if (!c.eval(shared, params)) return false;
      return true;
    case Op::Or:
      for (const auto& c : children)
        if (c.eval(shared, params)) return true;
      return false;
  }
  return false;
}

GuardFormula GuardFormula::negated() const {
  switch (op) {
    case Op::True: return make_false();
    case Op::False: return make_true();
    case Op::Atom: return make_atom(atom.negated());
    case Op::And:
    case Op::Or: {
      std::vector<GuardFormula> neg;
      neg.reserve(children.size());
      for (const auto& c : children) neg.push_back(c.negated());
      return op == Op::And ? make_or(std::move(neg)) : make_and(std::move(neg));
    }
  }
  return make_false();
}

void GuardFormula::collect_atoms(std::vector<GuardAtom>& out) const {
  if (op == Op::Atom) out.push_back(atom);
  for (const auto& c : children) c.collect_atoms(out);
}

// Satisfiability of a positive count formula by some assignment of naturals
// to locations, under per-location requirements accumulated on the way.
bool count_formula_satisfiable(const CountFormula& f,
                               const std::map<int, std::int64_t>& forced_min,
                               const std::set<int>& forced_zero) {
  switch (f.op) {
    case CountFormula::Op::True: return true;
    case CountFormula::Op::False: return false;
    case CountFormula::Op::Atom: {
      std::int64_t minv = 0;
      if (auto it = forced_min.find(f.atom.loc); it != forced_min.end()) minv = it->second;
      bool zero = forced_zero.count(f.atom.loc) > 0;
      switch (f.atom.kind) {
        case CountAtom::Kind::Ge: return !zero || f.atom.bound <= 0;
        case CountAtom::Kind::Eq0: return minv == 0;
        case CountAtom::Kind::Le: return minv <= f.atom.bound;
      }
      return false;
    }
    case CountFormula::Op::Or:
      for (const auto& c : f.children)
        if (count_formula_satisfiable(c, forced_min, forced_zero)) return true;
      return false;
    case CountFormula::Op::And: {
      // Conjunctions of atoms interact through shared locations; collect
      // atom requirements along one conjunct branch at a time.
      std::vector<const CountFormula*> atoms;
      std::vector<const CountFormula*> ors;
      std::deque<const CountFormula*> todo{&f};
      while (!todo.empty()) {
        const CountFormula* n = todo.front();
        todo.pop_front();
        switch (n->op) {
          case CountFormula::Op::And:
            for (const auto& c : n->children) todo.push_back(&c);
            break;
          case CountFormula::Op::Or: ors.push_back(n); break;
          case CountFormula::Op::Atom: atoms.push_back(n); break;
          case CountFormula::Op::False: return false;
          case CountFormula::Op::True: break;
        }
      }
      std::map<int, std::int64_t> mins = forced_min;
      std::set<int> zeros = forced_zero;
      for (const CountFormula* a : atoms) {
        int l = a->atom.loc;
        switch (a->atom.kind) {
          case CountAtom::Kind::Ge:
            mins[l] = std::max(mins.count(l) ? mins[l] : 0, a->atom.bound);
            if (zeros.count(l) && mins[l] > 0) return false;
            break;
          case CountAtom::Kind::Eq0:
            zeros.insert(l);
            if (mins.count(l) && mins[l] > 0) return false;
            break;
          case CountAtom::Kind::Le:
            if (mins.count(l) && mins[l] > a->atom.bound) return false;
            break;
        }
      }
      if (ors.empty()) return true;
      // Recurse on the first disjunction under the accumulated requirements.
      std::vector<CountFormula> rest;
      for (std::size_t i = 1; i < ors.size(); ++i) rest.push_back(*ors[i]);
      for (const auto& arm : ors[0]->children) {
        std::vector<CountFormula> conj = rest;
        conj.push_back(arm);
        if (count_formula_satisfiable(CountFormula::make_and(std::move(conj)), mins, zeros))
          return true;
      }
      return false;
    }
  }
  return false;
}

ErrorCondition error_condition(const SafetySpec& spec) {
  ErrorCondition err;
  for (const auto& pform : spec.body) {
    ErrorCondition::Disjunct d;
    d.guard = pform.gform ? pform.gform->negated() : GuardFormula::make_true();
    d.count = pform.cform.negated();
    err.disjuncts.push_back(std::move(d));
  }
  return err;
}

}  // namespace tamc
