#include "tamc/abstraction.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tamc/smt/encode.hpp"

namespace tamc {

using smt::TermRef;

std::string ThresholdOrder::str(const ThresholdAutomaton& ta) const {
  std::ostringstream out;
  for (int b = 0; b < num_blocks; ++b) {
    if (b) out << " < ";
    bool first = true;
    if (b == 0) {
      out << "0";
      first = false;
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (block_of[i] != b) continue;
      if (!first) out << " = ";
      out << "(" << thresholds[i].str(ta.params) << ")";
      first = false;
    }
  }
  out << "  [witness:";
  for (std::size_t i = 0; i < witness.size(); ++i)
    out << " " << ta.params[i] << "=" << witness[i];
  out << "]";
  return out.str();
}

ThresholdOrder induced_order(std::vector<LinearExpr> thresholds,
                             std::vector<std::int64_t> params) {
  ThresholdOrder o;
  o.thresholds = std::move(thresholds);
  o.witness = std::move(params);
  std::vector<std::int64_t> clamped;
  clamped.reserve(o.thresholds.size());
  for (const auto& t : o.thresholds) {
    std::int64_t c = t.eval(o.witness).ceil();
    clamped.push_back(c < 0 ? 0 : c);
  }
  std::vector<std::int64_t> values = clamped;
  values.push_back(0);  // the block of 0 always exists
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  o.num_blocks = (int)values.size();
  o.block_of.resize(o.thresholds.size());
  for (std::size_t i = 0; i < o.thresholds.size(); ++i)
    o.block_of[i] =
        (int)(std::lower_bound(values.begin(), values.end(), clamped[i]) - values.begin());
  return o;
}

namespace {

// Characteristic formula of an order over the ceiling variables c_i:
// block-0 members are <= 0, in-block members are equal, and consecutive
// block representatives are strictly increasing (with block 1 above 0).
TermRef order_characteristic(const ThresholdOrder& o, const std::vector<TermRef>& ceil_vars) {
  std::vector<TermRef> parts;
  std::vector<int> rep(o.num_blocks, -1);
  for (std::size_t i = 0; i < o.thresholds.size(); ++i) {
    int b = o.block_of[i];
    if (b == 0) {
      // Members of block 0 merely clamp to 0; they need not be equal.
      parts.push_back(smt::le(ceil_vars[i], smt::lit(0)));
      if (rep[0] < 0) rep[0] = (int)i;
    } else if (rep[b] < 0) {
      rep[b] = (int)i;
    } else {
      parts.push_back(smt::eq(ceil_vars[i], ceil_vars[rep[b]]));
    }
  }
  int prev = -1;
  for (int b = 1; b < o.num_blocks; ++b) {
    if (rep[b] < 0) continue;  // only block 0 can be threshold-free
    if (prev < 0)
      parts.push_back(smt::ge(ceil_vars[rep[b]], smt::lit(1)));
    else
      parts.push_back(smt::ge(ceil_vars[rep[b]],
                              smt::add({ceil_vars[prev], smt::lit(1)})));
    prev = rep[b];
  }
  return smt::land(std::move(parts));
}

}  // namespace

std::vector<TermRef> assert_order_realized(smt::SolverSession& session,
                                           const ThresholdOrder& order,
                                           const std::vector<TermRef>& param_terms,
                                           const std::string& prefix) {
  auto syms = [&](SymKind k, int idx) -> TermRef {
    if (k != SymKind::Param) throw std::logic_error("threshold may only reference parameters");
    return param_terms[idx];
  };
  std::vector<TermRef> ceil_vars;
  for (std::size_t i = 0; i < order.thresholds.size(); ++i) {
    std::string name = prefix + std::to_string(i);
    session.declare_int(name);
    TermRef c = smt::var(name);
    auto [scale, num] = smt::scaled_expr_term(order.thresholds[i], syms);
    session.assert_term(smt::ge(smt::mul(scale, c), num));
    session.assert_term(smt::le(smt::mul(scale, c), smt::add({num, smt::lit(scale - 1)})));
    ceil_vars.push_back(c);
  }
  session.assert_term(order_characteristic(order, ceil_vars));
  return ceil_vars;
}

OrderEnumeration enumerate_orders(const ThresholdAutomaton& ta, smt::SolverSession& session) {
  OrderEnumeration result;
  std::vector<LinearExpr> thresholds = ta.thresholds();

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

  std::vector<TermRef> param_vars;
  for (const auto& p : ta.params) {
    std::string name = "ord_p_" + p;
    session.declare_int(name);
    param_vars.push_back(smt::var(name));
    session.assert_term(smt::ge(param_vars.back(), smt::lit(0)));
  }
  auto syms = [&](SymKind k, int idx) -> TermRef {
    if (k != SymKind::Param) throw std::logic_error("RC may only reference parameters");
    return param_vars[idx];
  };
  for (const auto& c : ta.resilience) session.assert_term(smt::constraint_term(c, syms));

  {
    smt::SmtResult rc = session.check();
    if (rc.is_unknown()) {
      result.unknown = true;
      result.info = "resilience condition: " + rc.info;
      return result;
    }
    if (rc.is_unsat()) {
      result.rc_unsat = true;
      return result;
    }
  }

  // c_i = ceil(threshold_i): scale*c >= num and scale*c <= num + scale - 1.
  std::vector<TermRef> ceil_vars;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    std::string name = "ord_c_" + std::to_string(i);
    session.declare_int(name);
    TermRef c = smt::var(name);
    auto [scale, num] = smt::scaled_expr_term(thresholds[i], syms);
    session.assert_term(smt::ge(smt::mul(scale, c), num));
    session.assert_term(smt::le(smt::mul(scale, c), smt::add({num, smt::lit(scale - 1)})));
    ceil_vars.push_back(c);
  }

  // Incremental placement search: thresholds are inserted one at a time into
  // the block structure (the clamped-to-zero block, an existing positive
  // block, or a fresh gap), with one conjunctive feasibility query per
  // placement. Infeasible partial placements prune the whole subtree, and
  // every query is a plain conjunction, which keeps the solver work cheap.
  struct Placement {
    std::vector<int> zero_block;          // thresholds with ceiling <= 0
    std::vector<std::vector<int>> blocks; // ascending positive blocks
  };
  Placement placement;
  bool unknown = false;
  std::string unknown_info;

  // Constraints pinning threshold i into its slot, asserted inside a frame.
  auto assert_zero = [&](int i) { session.assert_term(smt::le(ceil_vars[i], smt::lit(0))); };
  auto assert_equal = [&](int i, int rep) {
    session.assert_term(smt::eq(ceil_vars[i], ceil_vars[rep]));
  };
  auto assert_between = [&](int i, int left_rep, int right_rep) {
    session.assert_term(smt::ge(ceil_vars[i], smt::lit(1)));
    if (left_rep >= 0)
      session.assert_term(smt::ge(ceil_vars[i], smt::add({ceil_vars[left_rep], smt::lit(1)})));
    if (right_rep >= 0)
      session.assert_term(smt::le(ceil_vars[i], smt::add({ceil_vars[right_rep], smt::lit(-1)})));
  };

  std::function<void(std::size_t, const smt::SmtResult&)> rec =
      [&](std::size_t i, const smt::SmtResult& model) {
        if (unknown) return;
        if (i == thresholds.size()) {
          ThresholdOrder order;
          order.thresholds = thresholds;
          order.num_blocks = 1 + (int)placement.blocks.size();
          order.block_of.assign(thresholds.size(), 0);
          for (std::size_t b = 0; b < placement.blocks.size(); ++b)
            for (int t : placement.blocks[b]) order.block_of[t] = (int)b + 1;
          for (const auto& p : ta.params)
            order.witness.push_back(model.model.at("ord_p_" + p));
          result.orders.push_back(std::move(order));
          return;
        }
        auto attempt = [&](const std::function<void()>& assert_slot,
                           const std::function<void()>& place,
                           const std::function<void()>& unplace) {
          if (unknown) return;
          session.push();
          assert_slot();
          smt::SmtResult r = session.check();
          if (r.is_unknown()) {
            unknown = true;
            unknown_info = r.info;
            session.pop();
            return;
          }
          if (r.is_sat()) {
            place();
            rec(i + 1, r);
            unplace();
          }
          session.pop();
        };

        // Clamped-to-zero block.
        attempt([&]() { assert_zero((int)i); },
                [&]() { placement.zero_block.push_back((int)i); },
                [&]() { placement.zero_block.pop_back(); });
        // Joining an existing positive block.
        for (std::size_t b = 0; b < placement.blocks.size(); ++b) {
          attempt([&]() { assert_equal((int)i, placement.blocks[b][0]); },
                  [&]() { placement.blocks[b].push_back((int)i); },
                  [&]() { placement.blocks[b].pop_back(); });
        }
        // A fresh block in any gap (before, between, after).
        for (std::size_t pos = 0; pos <= placement.blocks.size(); ++pos) {
          int left = pos == 0 ? -1 : placement.blocks[pos - 1][0];
          int right = pos == placement.blocks.size() ? -1 : placement.blocks[pos][0];
          attempt(
              [&]() { assert_between((int)i, left, right); },
              [&]() {
                placement.blocks.insert(placement.blocks.begin() + pos,
                                        std::vector<int>{(int)i});
              },
              [&]() { placement.blocks.erase(placement.blocks.begin() + pos); });
        }
      };

  smt::SmtResult base = session.check();
  if (base.is_unknown()) {
    result.unknown = true;
    result.info = base.info;
    return result;
  }
  rec(0, base);
  if (unknown) {
    result.unknown = true;
    result.info = "order enumeration: " + unknown_info;
    result.orders.clear();
    return result;
  }
  return result;
}

// ---------------------------------------------------------------------------
// IntervalTa
// ---------------------------------------------------------------------------

int IntervalTa::local_boundary(int var, const LinearExpr& threshold) const {
  int block = order.block_of_expr(threshold);
  if (block <= 0) return 0;
  const auto& bounds = var_boundaries[var];
  auto it = std::lower_bound(bounds.begin(), bounds.end(), block);
  if (it == bounds.end() || *it != block)
    throw std::logic_error("threshold is not a boundary of this variable");
  return (int)(it - bounds.begin());
}

bool IntervalTa::atom_true(const GuardAtom& atom, std::span<const int> abstract) const {
  int block = order.block_of_expr(atom.threshold);
  if (block < 0) throw std::logic_error("guard threshold missing from the order");
  if (atom.kind == GuardKind::Lower) {
    if (block == 0) return true;  // threshold clamps to 0 <= x
    return abstract[atom.var] >= local_boundary(atom.var, atom.threshold);
  }
  if (block == 0) return false;  // 0 > x never holds
  return abstract[atom.var] < local_boundary(atom.var, atom.threshold);
}

bool IntervalTa::guard_true(const Guard& g, std::span<const int> abstract) const {
  for (const auto& atom : g.conjuncts)
    if (!atom_true(atom, abstract)) return false;
  return true;
}

bool IntervalTa::gform_true(const GuardFormula& f, std::span<const int> abstract) const {
  switch (f.op) {
    case GuardFormula::Op::True: return true;
    case GuardFormula::Op::False: return false;
    case GuardFormula::Op::Atom: return atom_true(f.atom, abstract);
    case GuardFormula::Op::And:
      for (const auto& c : f.children)
        if (!gform_true(c, abstract)) return false;
      return true;
    case GuardFormula::Op::Or:
      for (const auto& c : f.children)
        if (gform_true(c, abstract)) return true;
      return false;
  }
  return false;
}

int IntervalTa::abstract_of(int var, std::int64_t value,
                            std::span<const std::int64_t> params) const {
  const auto& bounds = var_boundaries[var];
  int idx = 0;
  for (std::size_t j = 1; j < bounds.size(); ++j) {
    int t = order.representative(bounds[j]);
    std::int64_t b = order.thresholds[t].eval(params).ceil();
    if (b < 0) b = 0;
    if (value >= b) idx = (int)j;
  }
  return idx;
}

std::pair<int, int> IntervalTa::lift_range(const Rule& rule, int var, int a) const {
  int m = num_intervals(var) - 1;
  if (rule.resets.count(var)) return {0, 0};
  std::int64_t u = rule.updates[var];
  if (u == 0) return {a, a};
  if (u > 0) {
    int hi = (int)std::min<std::int64_t>(a + u, m);
    return {a, hi};
  }
  int lo = (int)std::max<std::int64_t>(a + u, 0);
  return {lo, a};
}

IntervalTa build_interval_ta(const ThresholdAutomaton& ta, ThresholdOrder order) {
  IntervalTa ita;
  ita.ta = &ta;
  ita.order = std::move(order);
  ita.var_boundaries.assign(ta.shared.size(), {0});

  auto consider = [&](const GuardAtom& atom) {
    int block = ita.order.block_of_expr(atom.threshold);
    if (block <= 0) return;
    auto& bounds = ita.var_boundaries[atom.var];
    auto it = std::lower_bound(bounds.begin(), bounds.end(), block);
    if (it == bounds.end() || *it != block) bounds.insert(it, block);
  };
  for (const auto& r : ta.rules)
    for (const auto& atom : r.guard.conjuncts) consider(atom);
  for (const auto& s : ta.specs) {
    std::vector<GuardAtom> atoms;
    for (const auto& p : s.body)
      if (p.gform) p.gform->collect_atoms(atoms);
    for (const auto& a : atoms) consider(a);
  }
  return ita;
}

}  // namespace tamc
