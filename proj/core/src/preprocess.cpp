#include "tamc/preprocess.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "tamc/smt/encode.hpp"

namespace tamc {

using smt::TermRef;


PreprocessResult simplify(const ThresholdAutomaton& ta, const SafetySpec& spec,
                          const PreprocessOptions& options, smt::SolverSession& session) {
  PreprocessResult out;
  ThresholdAutomaton a = ta;
  a.specs = {spec};
  PreprocessReport& report = out.report;

  // (1) self-loops without effect on the variables
  {
    auto keep = [](const Rule& r) {
      if (r.from != r.to) return true;
      if (!r.resets.empty()) return true;
      for (auto u : r.updates)
        if (u != 0) return true;
      return false;
    };
    std::size_t before = a.rules.size();
    std::erase_if(a.rules, [&](const Rule& r) { return !keep(r); });
    report.self_loops_removed = (int)(before - a.rules.size());
  }

  // (2)+(3): one solver scope with the parameters declared once.
  {
    session.push();
    std::vector<TermRef> pvars;
    for (const auto& p : a.params) {
      std::string name = "pre_p_" + p;
      session.declare_int(name);
      pvars.push_back(smt::var(name));
      session.assert_term(smt::ge(pvars.back(), smt::lit(0)));
    }
    auto syms = [&](SymKind k, int idx) -> TermRef {
      if (k != SymKind::Param) throw std::logic_error("unexpected symbol in guard threshold");
      return pvars[idx];
    };
    for (const auto& c : a.resilience) session.assert_term(smt::constraint_term(c, syms));

    std::vector<TermRef> gvars;
    for (const auto& g : a.shared) {
      std::string name = "pre_g_" + g;
      session.declare_int(name);
      gvars.push_back(smt::var(name));
      session.assert_term(smt::ge(gvars.back(), smt::lit(0)));
    }

    // A conjunct provable from RC alone over all g >= 0 is replaced by true.
    for (auto& rule : a.rules) {
      std::erase_if(rule.guard.conjuncts, [&](const GuardAtom& atom) {
        session.push();
        session.assert_term(smt::lnot(smt::guard_atom_term(atom, gvars[atom.var], syms)));
        smt::SmtResult r = session.check();
        session.pop();
        if (r.is_unsat()) {
          ++report.conjuncts_simplified;
          return true;
        }
        return false;
      });
    }

    if (options.prune_unsat_guards) {
      std::erase_if(a.rules, [&](const Rule& rule) {
        if (rule.guard.is_true()) return false;
        session.push();
        session.assert_term(smt::guard_term(rule.guard, gvars, syms));
        smt::SmtResult r = session.check();
        session.pop();
        if (r.is_unsat()) {
          ++report.unsat_guard_rules_removed;
          report.notes.push_back("rule " + std::to_string(rule.id) +
                                 " removed: guard unsatisfiable under RC");
          return true;
        }
        return false;
      });
    }
    session.pop();
  }

  // (4) locations unreachable in the location graph from the initial
  // locations permitted by the spec's initial restriction.
  {
    std::set<int> start;
    for (int l : a.initial) {
      if (!spec.init_restriction) {
        start.insert(l);
        continue;
      }
      std::map<int, std::int64_t> mins{{l, 1}};
      if (count_formula_satisfiable(*spec.init_restriction, mins, {})) start.insert(l);
    }

    std::set<int> reachable = start;
    std::deque<int> queue(start.begin(), start.end());
    while (!queue.empty()) {
      int l = queue.front();
      queue.pop_front();
      for (const auto& r : a.rules)
        if (r.from == l && !reachable.count(r.to)) {
          reachable.insert(r.to);
          queue.push_back(r.to);
        }
    }

    // Only locations named in the spec body are protected; restriction atoms
    // over a removed location fold to constants (its count is always 0).
    std::set<int> spec_named;
    for (const auto& p : spec.body) {
      std::vector<int> locs;
      p.cform.collect_locations(locs);
      spec_named.insert(locs.begin(), locs.end());
    }

    std::vector<int> removed;
    for (int l = 0; l < (int)a.locations.size(); ++l) {
      if (reachable.count(l)) continue;
      if (spec_named.count(l)) {
        report.notes.push_back("location " + a.locations[l] +
                               " is unreachable but named in the specification; kept");
        continue;
      }
      removed.push_back(l);
    }

    if (!removed.empty()) {
      std::vector<int> remap(a.locations.size(), -1);
      ThresholdAutomaton b;
      b.name = a.name;
      b.kind = a.kind;
      b.shared = a.shared;
      b.params = a.params;
      b.resilience = a.resilience;
      for (int l = 0; l < (int)a.locations.size(); ++l) {
        if (std::find(removed.begin(), removed.end(), l) != removed.end()) continue;
        remap[l] = (int)b.locations.size();
        b.locations.push_back(a.locations[l]);
      }
      for (int l : a.initial)
        if (remap[l] >= 0) b.initial.push_back(remap[l]);
      // A removed location's count is 0 on every considered run; its terms
      // drop out of the init constraints.
      for (const auto& c : a.init_constraints) {
        LinearConstraint nc;
        nc.constant = c.constant;
        nc.rel = c.rel;
        bool trivially_zero = true;
        for (const auto& t : c.terms) {
          if (t.sym == SymKind::Loc) {
            if (remap[t.index] < 0) continue;
            nc.terms.push_back({SymKind::Loc, remap[t.index], t.coeff});
          } else {
            nc.terms.push_back(t);
          }
          trivially_zero = false;
        }
        if (trivially_zero && nc.constant.is_zero()) continue;
        b.init_constraints.push_back(std::move(nc));
      }
      std::size_t rules_before = a.rules.size();
      for (const auto& r : a.rules) {
        if (remap[r.from] < 0 || remap[r.to] < 0) continue;
        Rule nr = r;
        nr.id = r.id;
        nr.from = remap[r.from];
        nr.to = remap[r.to];
        b.rules.push_back(std::move(nr));
      }
      report.rules_removed_with_locations = (int)(rules_before - b.rules.size());
      report.locations_removed = (int)removed.size();

      // Remap the checked spec; atoms over removed locations fold to their
      // constant truth at count 0.
      SafetySpec s = spec;
      auto remap_count = [&](CountFormula& f, auto&& self) -> void {
        if (f.op == CountFormula::Op::Atom) {
          if (remap[f.atom.loc] >= 0) {
            f.atom.loc = remap[f.atom.loc];
          } else if (f.atom.kind == CountAtom::Kind::Ge) {
            f = CountFormula::make_false();
          } else {
            f = CountFormula::make_true();
          }
          return;
        }
        for (auto& c : f.children) self(c, self);
      };
      if (s.init_restriction) remap_count(*s.init_restriction, remap_count);
      for (auto& p : s.body) remap_count(p.cform, remap_count);
      b.specs = {std::move(s)};
      for (int l : removed)
        report.notes.push_back("location " + a.locations[l] + " removed: unreachable");
      a = std::move(b);
    }
  }

  out.automaton = std::move(a);
  return out;
}

}  // namespace tamc
