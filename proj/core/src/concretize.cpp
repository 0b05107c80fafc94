#include "tamc/concretize.hpp"

#include "tamc/smt/encode.hpp"

namespace tamc {

using smt::TermRef;

PathQuery::PathQuery(const IntervalTa& ita, const SafetySpec& spec,
                     smt::SolverSession& session, const NodeAnnotation& initial)
    : ita_(ita), spec_(spec), session_(session) {
  const ThresholdAutomaton& ta = *ita_.ta;

  for (const auto& p : ta.params) {
    std::string name = "q_p_" + p;
    session_.declare_int(name);
    params_.push_back(smt::var(name));
    session_.assert_term(smt::ge(params_.back(), smt::lit(0)));
  }
  auto syms = [this](SymKind k, int idx) -> TermRef {
    switch (k) {
      case SymKind::Param: return params_[idx];
      case SymKind::Loc: return count_var(0, idx);
      case SymKind::Shared: return shared_var(0, idx);
    }
    return smt::lit(0);
  };
  for (const auto& c : ta.resilience) session_.assert_term(smt::constraint_term(c, syms));
  ceils_ = assert_order_realized(session_, ita_.order, params_, "q_c_");

  declare_node_vars(0);
  // Initial node: g = 0, counts supported on the initial locations, init
  // constraints, initial restriction.
  for (std::size_t v = 0; v < ta.shared.size(); ++v)
    session_.assert_term(smt::eq(shared_var(0, (int)v), smt::lit(0)));
  for (int l = 0; l < (int)ta.locations.size(); ++l)
    if (!ta.is_initial_location(l))
      session_.assert_term(smt::eq(count_var(0, l), smt::lit(0)));
  for (const auto& c : ta.init_constraints) session_.assert_term(smt::constraint_term(c, syms));
  if (spec_.init_restriction) {
    std::vector<TermRef> counts;
    for (int l = 0; l < (int)ta.locations.size(); ++l) counts.push_back(count_var(0, l));
    session_.assert_term(smt::count_formula_term(*spec_.init_restriction, counts));
  }
  assert_node_annotation(0, initial);
}

TermRef PathQuery::count_var(int node, int loc) const {
  return smt::var("q_k" + std::to_string(node) + "_" + std::to_string(loc));
}
TermRef PathQuery::shared_var(int node, int var) const {
  return smt::var("q_g" + std::to_string(node) + "_" + std::to_string(var));
}
TermRef PathQuery::block_var(int step) const {
  return smt::var("q_n" + std::to_string(step));
}

void PathQuery::declare_node_vars(int node) {
  const ThresholdAutomaton& ta = *ita_.ta;
  for (int l = 0; l < (int)ta.locations.size(); ++l) {
    std::string name = "q_k" + std::to_string(node) + "_" + std::to_string(l);
    session_.declare_int(name);
    session_.assert_term(smt::ge(smt::var(name), smt::lit(0)));
  }
  for (int v = 0; v < (int)ta.shared.size(); ++v) {
    std::string name = "q_g" + std::to_string(node) + "_" + std::to_string(v);
    session_.declare_int(name);
    session_.assert_term(smt::ge(smt::var(name), smt::lit(0)));
  }
}

void PathQuery::assert_interval_member(TermRef g, int var, int interval) {
  const auto& bounds = ita_.var_boundaries[var];
  if (interval >= 1) {
    int t = ita_.order.representative(bounds[interval]);
    session_.assert_term(smt::ge(g, ceils_[t]));  // g >= boundary value
  }
  if (interval + 1 < (int)bounds.size()) {
    int t = ita_.order.representative(bounds[interval + 1]);
    session_.assert_term(smt::le(g, smt::add({ceils_[t], smt::lit(-1)})));
  }
}

void PathQuery::assert_node_annotation(int node, const NodeAnnotation& a) {
  const ThresholdAutomaton& ta = *ita_.ta;
  for (std::size_t v = 0; v < ta.shared.size(); ++v)
    assert_interval_member(shared_var(node, (int)v), (int)v, a.abstract[v]);
  if (!a.bits.empty()) {
    for (int l = 0; l < (int)ta.locations.size(); ++l) {
      if (a.bits[l] == 0)
        session_.assert_term(smt::eq(count_var(node, l), smt::lit(0)));
      else
        session_.assert_term(smt::ge(count_var(node, l), smt::lit(1)));
    }
  }
  if (!a.min_counts.empty()) {
    for (int l = 0; l < (int)ta.locations.size(); ++l)
      if (a.min_counts[l] > 0)
        session_.assert_term(smt::ge(count_var(node, l), smt::lit(a.min_counts[l])));
  }
}

void PathQuery::push_step(int rule_index, const NodeAnnotation& post) {
  const ThresholdAutomaton& ta = *ita_.ta;
  const Rule& rule = ta.rules[rule_index];
  int pre = (int)steps_.size();
  int cur = pre + 1;
  int step = pre;

  session_.push();
  steps_.push_back(rule_index);
  declare_node_vars(cur);

  std::string nname = "q_n" + std::to_string(step);
  session_.declare_int(nname);
  TermRef n = smt::var(nname);
  session_.assert_term(smt::ge(n, smt::lit(1)));
  const bool single = !rule.is_monotonic();  // resets/decrements fire singly
  if (single) session_.assert_term(smt::eq(n, smt::lit(1)));

  // Flow on counts.
  for (int l = 0; l < (int)ta.locations.size(); ++l) {
    TermRef prev = count_var(pre, l);
    TermRef next = count_var(cur, l);
    if (rule.from == rule.to || (l != rule.from && l != rule.to)) {
      session_.assert_term(smt::eq(next, prev));
    } else if (l == rule.from) {
      session_.assert_term(smt::eq(next, smt::add({prev, smt::mul(-1, n)})));
    } else {
      session_.assert_term(smt::eq(next, smt::add({prev, n})));
    }
  }
  // A block of k firings from `from` needs k processes there (one when
  // from == to); for from != to this is implied by count_var >= 0.
  if (rule.from == rule.to)
    session_.assert_term(smt::ge(count_var(pre, rule.from), smt::lit(1)));

  // Shared updates.
  for (int v = 0; v < (int)ta.shared.size(); ++v) {
    TermRef prev = shared_var(pre, v);
    TermRef next = shared_var(cur, v);
    if (rule.resets.count(v)) {
      session_.assert_term(smt::eq(next, smt::lit(0)));
    } else if (rule.updates[v] == 0) {
      session_.assert_term(smt::eq(next, prev));
    } else {
      session_.assert_term(smt::eq(next, smt::add({prev, smt::mul(rule.updates[v], n)})));
    }
  }

  // Guards, exact per firing within the block. Lower guards are hardest at
  // the block start; upper guards at the value before the last firing.
  for (const auto& atom : rule.guard.conjuncts) {
    int t = ita_.order.index_of_expr(atom.threshold);
    TermRef c = ceils_[t];
    if (atom.kind == GuardKind::Lower) {
      session_.assert_term(smt::ge(shared_var(pre, atom.var), c));
    } else if (single) {
      session_.assert_term(smt::le(shared_var(pre, atom.var), smt::add({c, smt::lit(-1)})));
    } else {
      // last pre-value = g_post - uv
      TermRef last_pre =
          smt::add({shared_var(cur, atom.var), smt::lit(-rule.updates[atom.var])});
      session_.assert_term(smt::le(last_pre, smt::add({c, smt::lit(-1)})));
    }
  }

  assert_node_annotation(cur, post);
}

void PathQuery::pop_step() {
  session_.pop();
  steps_.pop_back();
}

smt::SmtResult PathQuery::check() { return session_.check(); }

smt::SmtResult PathQuery::check_with_error() {
  const ThresholdAutomaton& ta = *ita_.ta;
  int node = (int)steps_.size();
  session_.push();
  ErrorCondition err = error_condition(spec_);
  std::vector<TermRef> counts, shareds;
  for (int l = 0; l < (int)ta.locations.size(); ++l) counts.push_back(count_var(node, l));
  for (int v = 0; v < (int)ta.shared.size(); ++v) shareds.push_back(shared_var(node, v));
  auto syms = [this](SymKind k, int idx) -> TermRef {
    if (k == SymKind::Param) return params_[idx];
    throw std::logic_error("error condition references a non-parameter symbol");
  };
  std::vector<TermRef> disjuncts;
  for (const auto& d : err.disjuncts) {
    TermRef g = smt::guard_formula_term(d.guard, shareds, syms);
    TermRef c = smt::count_formula_term(d.count, counts);
    disjuncts.push_back(smt::land({g, c}));
  }
  session_.assert_term(smt::lor(std::move(disjuncts)));
  smt::SmtResult r = session_.check();
  session_.pop();
  return r;
}

Trace PathQuery::trace_from_model(const smt::SmtResult& sat) const {
  const ThresholdAutomaton& ta = *ita_.ta;
  Trace t;
  t.spec_name = spec_.name;
  for (std::size_t i = 0; i < ta.params.size(); ++i)
    t.params.push_back(sat.model.at("q_p_" + ta.params[i]));
  for (std::size_t s = 0; s < steps_.size(); ++s) {
    std::int64_t count = sat.model.at("q_n" + std::to_string(s));
    int id = ta.rules[steps_[s]].id;
    if (!t.steps.empty() && t.steps.back().rule == id)
      t.steps.back().count += count;
    else
      t.steps.push_back({id, count});
  }
  return t;
}

}  // namespace tamc
