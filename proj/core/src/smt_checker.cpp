#include "tamc/smt_checker.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "tamc/checker.hpp"
#include "tamc/smt/encode.hpp"

namespace tamc {

using smt::TermRef;

namespace {

struct Encoder {
  const ThresholdAutomaton& ta;
  const SafetySpec& spec;
  smt::SolverSession& session;
  int segments = 1;

  // Firing a self-loop without variable effects changes nothing; pinning its
  // counts to zero is an exact reduction that spares the solver a free
  // variable and a guard implication per segment.
  bool rule_is_noop(const Rule& r) const {
    if (r.from != r.to || !r.resets.empty()) return false;
    for (auto u : r.updates)
      if (u != 0) return false;
    return true;
  }
  std::vector<TermRef> params;
  std::vector<LinearExpr> thresholds;
  std::vector<TermRef> ceils;

  std::string kname(int i, int l) const {
    return "s_k" + std::to_string(i) + "_" + std::to_string(l);
  }
  std::string gname(int i, int v) const {
    return "s_g" + std::to_string(i) + "_" + std::to_string(v);
  }
  std::string xname(int i, std::size_t r) const {
    return "s_x" + std::to_string(i) + "_" + std::to_string(r);
  }
  std::string dname(int i, int l) const {
    return "s_d" + std::to_string(i) + "_" + std::to_string(l);
  }

  TermRef ceil_of(const LinearExpr& e) const {
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (thresholds[i] == e) return ceils[i];
    throw std::logic_error("threshold not collected");
  }

  void declare_nonneg(const std::string& name) {
    session.declare_int(name);
    session.assert_term(smt::ge(smt::var(name), smt::lit(0)));
  }

  void encode() {
    std::vector<GuardAtom> atoms = ta.distinct_rule_atoms();
    segments = (int)atoms.size() + 1;

    for (const auto& p : ta.params) {
      std::string name = "s_p_" + p;
      declare_nonneg(name);
      params.push_back(smt::var(name));
    }
    auto psyms = [this](SymKind k, int idx) -> TermRef {
      if (k != SymKind::Param) throw std::logic_error("unexpected symbol kind");
      return params[idx];
    };
    for (const auto& c : ta.resilience) session.assert_term(smt::constraint_term(c, psyms));

    // Ceiling variables for all thresholds (guards compare integers, so a
    // threshold acts as its ceiling); no order between them is assumed.
    thresholds = ta.thresholds();
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      std::string name = "s_c_" + std::to_string(i);
      session.declare_int(name);
      TermRef c = smt::var(name);
      auto [scale, num] = smt::scaled_expr_term(thresholds[i], psyms);
      session.assert_term(smt::ge(smt::mul(scale, c), num));
      session.assert_term(smt::le(smt::mul(scale, c), smt::add({num, smt::lit(scale - 1)})));
      ceils.push_back(c);
    }

    for (int i = 0; i <= segments; ++i) {
      for (int l = 0; l < (int)ta.locations.size(); ++l) declare_nonneg(kname(i, l));
      for (int v = 0; v < (int)ta.shared.size(); ++v) declare_nonneg(gname(i, v));
    }
    for (int i = 0; i < segments; ++i) {
      for (std::size_t r = 0; r < ta.rules.size(); ++r) {
        declare_nonneg(xname(i, r));
        if (rule_is_noop(ta.rules[r]))
          session.assert_term(smt::eq(smt::var(xname(i, r)), smt::lit(0)));
      }
      for (int l = 0; l < (int)ta.locations.size(); ++l) {
        declare_nonneg(dname(i, l));
        session.assert_term(
            smt::le(smt::var(dname(i, l)), smt::lit((std::int64_t)ta.locations.size())));
      }
    }

    encode_boundaries();
    for (int i = 0; i < segments; ++i) encode_segment(i);
  }

  std::set<int> exec_asserted;

  // Asserts the per-location certificate for the given locations in every
  // segment. Returns false when nothing new was added.
  bool encode_executability_for(const std::set<int>& locations) {
    bool added = false;
    for (int l : locations) {
      if (!exec_asserted.insert(l).second) continue;
      added = true;
      for (int i = 0; i < segments; ++i) encode_location_executability(i, l);
    }
    return added;
  }

  void encode_boundaries() {
    // Initial boundary.
    for (int v = 0; v < (int)ta.shared.size(); ++v)
      session.assert_term(smt::eq(smt::var(gname(0, v)), smt::lit(0)));
    for (int l = 0; l < (int)ta.locations.size(); ++l)
      if (!ta.is_initial_location(l))
        session.assert_term(smt::eq(smt::var(kname(0, l)), smt::lit(0)));
    auto syms0 = [this](SymKind k, int idx) -> TermRef {
      switch (k) {
        case SymKind::Param: return params[idx];
        case SymKind::Loc: return smt::var(kname(0, idx));
        case SymKind::Shared: return smt::var(gname(0, idx));
      }
      return smt::lit(0);
    };
    for (const auto& c : ta.init_constraints)
      session.assert_term(smt::constraint_term(c, syms0));
    if (spec.init_restriction) {
      std::vector<TermRef> counts;
      for (int l = 0; l < (int)ta.locations.size(); ++l) counts.push_back(smt::var(kname(0, l)));
      session.assert_term(smt::count_formula_term(*spec.init_restriction, counts));
    }

    // Error condition at the final boundary.
    ErrorCondition err = error_condition(spec);
    std::vector<TermRef> counts, shareds;
    for (int l = 0; l < (int)ta.locations.size(); ++l)
      counts.push_back(smt::var(kname(segments, l)));
    for (int v = 0; v < (int)ta.shared.size(); ++v)
      shareds.push_back(smt::var(gname(segments, v)));
    auto psyms = [this](SymKind k, int idx) -> TermRef {
      if (k != SymKind::Param) throw std::logic_error("unexpected symbol kind");
      return params[idx];
    };
    std::vector<TermRef> disjuncts;
    for (const auto& d : err.disjuncts)
      disjuncts.push_back(smt::land({smt::guard_formula_term(d.guard, shareds, psyms),
                                     smt::count_formula_term(d.count, counts)}));
    session.assert_term(smt::lor(std::move(disjuncts)));
  }

  void encode_segment(int i) {
    // Flow and shared-variable sums.
    for (int l = 0; l < (int)ta.locations.size(); ++l) {
      std::vector<TermRef> sum{smt::var(kname(i, l))};
      for (std::size_t r = 0; r < ta.rules.size(); ++r) {
        int delta = (ta.rules[r].to == l ? 1 : 0) - (ta.rules[r].from == l ? 1 : 0);
        if (delta != 0) sum.push_back(smt::mul(delta, smt::var(xname(i, r))));
      }
      session.assert_term(smt::eq(smt::var(kname(i + 1, l)), smt::add(std::move(sum))));
    }
    for (int v = 0; v < (int)ta.shared.size(); ++v) {
      std::vector<TermRef> sum{smt::var(gname(i, v))};
      for (std::size_t r = 0; r < ta.rules.size(); ++r)
        if (ta.rules[r].updates[v] != 0)
          sum.push_back(smt::mul(ta.rules[r].updates[v], smt::var(xname(i, r))));
      session.assert_term(smt::eq(smt::var(gname(i + 1, v)), smt::add(std::move(sum))));
    }

    // Steady guards: a fired rule's lower guards hold at the segment start,
    // its upper guards at the segment end.
    for (std::size_t r = 0; r < ta.rules.size(); ++r) {
      const Rule& rule = ta.rules[r];
      if (rule.guard.is_true() || rule_is_noop(rule)) continue;
      std::vector<TermRef> conds;
      for (const auto& atom : rule.guard.conjuncts) {
        TermRef c = ceil_of(atom.threshold);
        if (atom.kind == GuardKind::Lower)
          conds.push_back(smt::ge(smt::var(gname(i, atom.var)), c));
        else
          conds.push_back(smt::le(smt::var(gname(i + 1, atom.var)), smt::add({c, smt::lit(-1)})));
      }
      session.assert_term(smt::implies(smt::ge(smt::var(xname(i, r)), smt::lit(1)),
                                       smt::land(std::move(conds))));
    }

    // A self-loop has zero net flow, so the flow constraints say nothing
    // about its support; firing it still needs a process at its location.
    for (std::size_t r = 0; r < ta.rules.size(); ++r) {
      const Rule& rule = ta.rules[r];
      if (rule.from != rule.to || rule_is_noop(rule)) continue;
      std::vector<TermRef> supply{smt::var(kname(i, rule.from))};
      for (std::size_t q = 0; q < ta.rules.size(); ++q)
        if (ta.rules[q].to == rule.from && ta.rules[q].from != rule.from &&
            !rule_is_noop(ta.rules[q]))
          supply.push_back(smt::var(xname(i, q)));
      session.assert_term(smt::implies(smt::ge(smt::var(xname(i, r)), smt::lit(1)),
                                       smt::ge(smt::add(std::move(supply)), smt::lit(1))));
    }
  }

  // Executability: every weakly connected component of the fired-rule
  // multigraph contains a location populated at the segment start, certified
  // by distance variables decreasing toward such a root. Asserted lazily,
  // per location: the relaxed query is solved first, models are validated by
  // direct multigraph traversal, and only the locations of failing
  // components get their certificate constraints.
  void encode_location_executability(int i, int l) {
    {
      std::vector<TermRef> incident;
      std::vector<TermRef> witness;
      witness.push_back(smt::land({smt::ge(smt::var(kname(i, l)), smt::lit(1)),
                                   smt::eq(smt::var(dname(i, l)), smt::lit(0))}));
      for (std::size_t r = 0; r < ta.rules.size(); ++r) {
        const Rule& rule = ta.rules[r];
        if (rule_is_noop(rule)) continue;
        if (rule.from != l && rule.to != l) continue;
        incident.push_back(smt::ge(smt::var(xname(i, r)), smt::lit(1)));
        int other = rule.from == l ? rule.to : rule.from;
        if (other == l) continue;  // self-loop edges provide no parent
        witness.push_back(
            smt::land({smt::ge(smt::var(xname(i, r)), smt::lit(1)),
                       smt::le(smt::add({smt::var(dname(i, other)), smt::lit(1)}),
                               smt::var(dname(i, l)))}));
      }
      if (incident.empty()) return;
      session.assert_term(
          smt::implies(smt::lor(std::move(incident)), smt::lor(std::move(witness))));
    }
  }
};

// ---------------------------------------------------------------------------
// Trace reconstruction from a model.
// ---------------------------------------------------------------------------

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

// Every weakly connected component of the residual support graph must hold a
// process under the current marking. Returns the locations of unmarked
// components (empty when the certificate holds).
std::set<int> unmarked_component_locations(const ThresholdAutomaton& ta,
                                           const std::vector<std::int64_t>& residual,
                                           const std::vector<std::int64_t>& marking) {
  UnionFind uf((int)ta.locations.size());
  for (std::size_t r = 0; r < ta.rules.size(); ++r)
    if (residual[r] > 0) uf.join(ta.rules[r].from, ta.rules[r].to);
  std::map<int, std::int64_t> tokens;
  std::set<int> in_support;
  for (std::size_t r = 0; r < ta.rules.size(); ++r)
    if (residual[r] > 0) {
      in_support.insert(uf.find(ta.rules[r].from));
      in_support.insert(uf.find(ta.rules[r].to));
    }
  for (int l = 0; l < (int)ta.locations.size(); ++l) tokens[uf.find(l)] += marking[l];
  std::set<int> bad;
  for (int l = 0; l < (int)ta.locations.size(); ++l) {
    int root = uf.find(l);
    if (in_support.count(root) && tokens[root] == 0) bad.insert(l);
  }
  return bad;
}

bool components_marked(const ThresholdAutomaton& ta, const std::vector<std::int64_t>& residual,
                       const std::vector<std::int64_t>& marking) {
  return unmarked_component_locations(ta, residual, marking).empty();
}

// Schedules one segment's firing counts into an executable order, preferring
// maximal blocks of the lowest-id rule that keep the residual realizable.
void schedule_segment(const ThresholdAutomaton& ta, std::vector<std::int64_t> residual,
                      std::vector<std::int64_t>& marking, std::vector<Trace::Step>& out) {
  auto remaining = [&]() {
    std::int64_t t = 0;
    for (auto x : residual) t += x;
    return t;
  };
  while (remaining() > 0) {
    bool fired = false;
    for (std::size_t r = 0; r < ta.rules.size() && !fired; ++r) {
      if (residual[r] == 0) continue;
      const Rule& rule = ta.rules[r];
      if (marking[rule.from] == 0) continue;
      std::int64_t max_block = rule.from == rule.to
                                   ? residual[r]
                                   : std::min(residual[r], marking[rule.from]);
      std::vector<std::int64_t> blocks{max_block};
      if (max_block > 1) blocks.push_back(1);
      for (std::int64_t block : blocks) {
        std::vector<std::int64_t> nres = residual;
        std::vector<std::int64_t> nmark = marking;
        nres[r] -= block;
        if (rule.from != rule.to) {
          nmark[rule.from] -= block;
          nmark[rule.to] += block;
        }
        if (!components_marked(ta, nres, nmark)) continue;
        residual = std::move(nres);
        marking = std::move(nmark);
        if (!out.empty() && out.back().rule == rule.id)
          out.back().count += block;
        else
          out.push_back({rule.id, block});
        fired = true;
        break;
      }
    }
    if (!fired)
      throw std::logic_error(
          "trace reconstruction failed: no enabled rule preserves the executability "
          "certificate (encoding bug)");
  }
}

}  // namespace

Verdict smt_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  smt::SolverSession& session) {
  if (ta.kind != AutomatonKind::Mta)
    throw UnsupportedCheck(
        "the SMT checker requires an MTA: it relies on the monotonicity of guards");

  session.push();
  struct PopGuard {
    smt::SolverSession& s;
    ~PopGuard() {
      try {
        s.pop();
      } catch (...) {
      }
    }
  } guard{session};

  Encoder enc{ta, spec, session, 1, {}, {}, {}, {}};
  // The executability certificate is asserted lazily: dropping it only adds
  // models, so unsat on the relaxed query is already safe, and a model whose
  // per-segment flows pass the direct multigraph check is already a run.
  enc.encode();
  for (;;) {
    smt::SmtResult r = session.check();
    if (r.is_unsat()) return Verdict::safe();
    if (r.is_unknown()) return Verdict::unknown("SMT reachability query: " + r.info);

    std::set<int> failing;
    std::vector<std::int64_t> marking;
    for (int l = 0; l < (int)ta.locations.size(); ++l)
      marking.push_back(r.model.at(enc.kname(0, l)));
    for (int i = 0; i < enc.segments && failing.empty(); ++i) {
      std::vector<std::int64_t> residual;
      for (std::size_t x = 0; x < ta.rules.size(); ++x)
        residual.push_back(r.model.at(enc.xname(i, (int)x)));
      failing = unmarked_component_locations(ta, residual, marking);
      for (int l = 0; l < (int)ta.locations.size(); ++l)
        marking[l] = r.model.at(enc.kname(i + 1, l));
    }
    if (!failing.empty()) {
      if (!enc.encode_executability_for(failing))
        return Verdict::unknown("model violates the executability certificate (encoding bug)");
      continue;
    }

    // Reconstruct a trace segment by segment from the model's firing counts.
    Trace trace;
    trace.spec_name = spec.name;
    for (const auto& p : ta.params) trace.params.push_back(r.model.at("s_p_" + p));
    std::vector<std::int64_t> start;
    for (int l = 0; l < (int)ta.locations.size(); ++l)
      start.push_back(r.model.at(enc.kname(0, l)));
    for (int i = 0; i < enc.segments; ++i) {
      std::vector<std::int64_t> residual;
      for (std::size_t x = 0; x < ta.rules.size(); ++x)
        residual.push_back(r.model.at(enc.xname(i, (int)x)));
      schedule_segment(ta, std::move(residual), start, trace.steps);
    }
    return Verdict::unsafe(std::move(trace));
  }
}

}  // namespace tamc
