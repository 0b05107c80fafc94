#include "tamc/render.hpp"

#include <sstream>

namespace tamc {

namespace {

std::string expr_str(const ThresholdAutomaton& ta, const LinearExpr& e) {
  return e.str(ta.params);
}

std::string atom_str(const ThresholdAutomaton& ta, const GuardAtom& a) {
  const std::string& var = ta.shared[a.var];
  if (a.kind == GuardKind::Lower) return var + " >= " + expr_str(ta, a.threshold);
  return var + " < " + expr_str(ta, a.threshold);
}

// sum(coeff*sym) + constant REL 0, printed with negative terms moved to the
// right-hand side.
std::string constraint_str(const ThresholdAutomaton& ta, const LinearConstraint& c) {
  auto sym_name = [&](const LinearConstraint::Term& t) -> const std::string& {
    switch (t.sym) {
      case SymKind::Loc: return ta.locations[t.index];
      case SymKind::Shared: return ta.shared[t.index];
      default: return ta.params[t.index];
    }
  };
  std::ostringstream lhs, rhs;
  bool lfirst = true, rfirst = true;
  auto emit = [](std::ostringstream& out, bool& first, Rational coeff, const std::string& sym) {
    if (!first) out << " + ";
    if (coeff != Rational(1)) out << coeff.str() << " * ";
    out << sym;
    first = false;
  };
  for (const auto& t : c.terms) {
    if (t.coeff > Rational(0))
      emit(lhs, lfirst, t.coeff, sym_name(t));
    else
      emit(rhs, rfirst, -t.coeff, sym_name(t));
  }
  if (c.constant > Rational(0)) {
    if (!lfirst) lhs << " + ";
    lhs << c.constant.str();
    lfirst = false;
  } else if (c.constant < Rational(0)) {
    if (!rfirst) rhs << " + ";
    rhs << (-c.constant).str();
    rfirst = false;
  }
  if (lfirst) lhs << "0";
  if (rfirst) rhs << "0";
  return lhs.str() + (c.rel == LinearConstraint::Rel::Eq ? " == " : " >= ") + rhs.str();
}

}  // namespace

std::string render_guard(const ThresholdAutomaton& ta, const Guard& guard) {
  if (guard.is_true()) return "true";
  if (guard.conjuncts.size() == 1) return atom_str(ta, guard.conjuncts[0]);
  std::ostringstream out;
  for (std::size_t i = 0; i < guard.conjuncts.size(); ++i) {
    if (i) out << " && ";
    out << "(" << atom_str(ta, guard.conjuncts[i]) << ")";
  }
  return out.str();
}

std::string render_count_formula(const ThresholdAutomaton& ta, const CountFormula& f) {
  switch (f.op) {
    case CountFormula::Op::True: return "true";
    case CountFormula::Op::False: return "false";
    case CountFormula::Op::Atom: {
      const std::string& loc = ta.locations[f.atom.loc];
      switch (f.atom.kind) {
        case CountAtom::Kind::Ge: return loc + " >= " + std::to_string(f.atom.bound);
        case CountAtom::Kind::Eq0: return loc + " == 0";
        case CountAtom::Kind::Le: return loc + " <= " + std::to_string(f.atom.bound);
      }
      return "";
    }
    case CountFormula::Op::And:
    case CountFormula::Op::Or: {
      std::ostringstream out;
      const char* op = f.op == CountFormula::Op::And ? " && " : " || ";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) out << op;
        out << "(" << render_count_formula(ta, f.children[i]) << ")";
      }
      return out.str();
    }
  }
  return "";
}

std::string render_guard_formula(const ThresholdAutomaton& ta, const GuardFormula& f) {
  switch (f.op) {
    case GuardFormula::Op::True: return "true";
    case GuardFormula::Op::False: return "false";
    case GuardFormula::Op::Atom: return atom_str(ta, f.atom);
    case GuardFormula::Op::And:
    case GuardFormula::Op::Or: {
      std::ostringstream out;
      const char* op = f.op == GuardFormula::Op::And ? " && " : " || ";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) out << op;
        out << "(" << render_guard_formula(ta, f.children[i]) << ")";
      }
      return out.str();
    }
  }
  return "";
}

std::string render(const ThresholdAutomaton& ta) {
  std::ostringstream out;
  out << "ta " << ta.name << " {\n";

  if (!ta.shared.empty()) {
    out << "    shared ";
    for (std::size_t i = 0; i < ta.shared.size(); ++i) out << (i ? ", " : "") << ta.shared[i];
    out << ";\n";
  }
  if (!ta.params.empty()) {
    out << "    parameters ";
    for (std::size_t i = 0; i < ta.params.size(); ++i) out << (i ? ", " : "") << ta.params[i];
    out << ";\n";
  }

  out << "    assumptions (" << ta.resilience.size() << ") {";
  for (const auto& c : ta.resilience) out << " " << constraint_str(ta, c) << ";";
  out << " }\n";

  out << "    locations (" << ta.locations.size() << ") {";
  for (std::size_t i = 0; i < ta.locations.size(); ++i)
    out << " " << ta.locations[i] << ": [" << i << "];";
  out << " }\n";

  out << "    inits (" << ta.init_constraints.size() << ") {";
  for (const auto& c : ta.init_constraints) out << " " << constraint_str(ta, c) << ";";
  out << " }\n";

  out << "    rules (" << ta.rules.size() << ") {\n";
  for (const auto& r : ta.rules) {
    out << "        " << r.id << ": " << ta.locations[r.from] << " -> " << ta.locations[r.to]
        << " when (" << render_guard(ta, r.guard) << ") do {";
    for (std::size_t v = 0; v < ta.shared.size(); ++v) {
      const std::string& name = ta.shared[v];
      if (r.resets.count((int)v)) {
        out << " " << name << "' := 0;";
      } else if (r.updates[v] > 0) {
        out << " " << name << "' := " << name << " + " << r.updates[v] << ";";
      } else if (r.updates[v] < 0) {
        out << " " << name << "' := " << name << " - " << -r.updates[v] << ";";
      }
    }
    out << " };\n";
  }
  out << "    }\n";

  out << "    specifications (" << ta.specs.size() << ") {\n";
  for (const auto& s : ta.specs) {
    out << "        " << s.name << ": ";
    if (s.init_restriction)
      out << render_count_formula(ta, *s.init_restriction) << " -> ";
    out << "[](";
    for (std::size_t i = 0; i < s.body.size(); ++i) {
      if (i) out << " && ";
      const Pform& p = s.body[i];
      std::string cpart = render_count_formula(ta, p.cform);
      if (p.gform) {
        out << "((" << render_guard_formula(ta, *p.gform) << ") || (" << cpart << "))";
      } else {
        out << "(" << cpart << ")";
      }
    }
    out << ");\n";
  }
  out << "    }\n";

  out << "}\n";
  return out.str();
}

}  // namespace tamc
