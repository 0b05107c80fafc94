#include "tamc/zcs_checker.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <iostream>
#include <set>

#include "tamc/abstraction.hpp"
#include "tamc/concretize.hpp"
#include "tamc/sym/bdd.hpp"

namespace tamc {

namespace {

using sym::BddRef;

struct BudgetHit {};

// Bit layout: location bits first (declaration order), then the binary
// encoding of each shared variable's interval index. State bit i maps to
// BDD variable 2i (unprimed) / 2i+1 (primed).
struct ZcsSpace {
  const ThresholdAutomaton& ta;
  const IntervalTa& ita;
  sym::BddManager mgr;
  int num_bits;
  std::vector<int> shared_base;   // first state bit of each variable
  std::vector<int> shared_width;  // bits per variable
  std::vector<int> unprimed_vars;
  std::vector<bool> unprimed_mask, primed_mask;
  std::vector<int> to_primed, to_unprimed;
  std::vector<BddRef> rule_rel;  // per rule, over unprimed+primed
  BddRef domain = 0;             // valid interval encodings, unprimed

  explicit ZcsSpace(const IntervalTa& interval_ta)
      : ta(*interval_ta.ta), ita(interval_ta), mgr(1), num_bits(0) {
    int bits = (int)ta.locations.size();
    for (std::size_t v = 0; v < ta.shared.size(); ++v) {
      shared_base.push_back(bits);
      int width = 1;
      while ((1 << width) < ita.num_intervals((int)v)) ++width;
      shared_width.push_back(width);
      bits += width;
    }
    num_bits = bits;
    mgr = sym::BddManager(2 * num_bits);
    unprimed_mask.assign(2 * num_bits, false);
    primed_mask.assign(2 * num_bits, false);
    to_primed.resize(2 * num_bits);
    to_unprimed.resize(2 * num_bits);
    for (int i = 0; i < num_bits; ++i) {
      unprimed_vars.push_back(2 * i);
      unprimed_mask[2 * i] = true;
      primed_mask[2 * i + 1] = true;
      // swapping adjacent pairs preserves the variable order on either side
      to_primed[2 * i] = 2 * i + 1;
      to_primed[2 * i + 1] = 2 * i;
      to_unprimed[2 * i] = 2 * i + 1;
      to_unprimed[2 * i + 1] = 2 * i;
    }

    build_domain();
    build_relation();
  }

  // --- state encoding helpers (unprimed side; primed = +1) ---

  BddRef bit_is(int state_bit, bool value, bool primed) {
    int var = 2 * state_bit + (primed ? 1 : 0);
    return value ? mgr.var(var) : mgr.nvar(var);
  }

  BddRef value_is(int shared_var, int value, bool primed) {
    BddRef r = mgr.btrue();
    for (int j = 0; j < shared_width[shared_var]; ++j)
      r = mgr.band(r, bit_is(shared_base[shared_var] + j, (value >> j) & 1, primed));
    return r;
  }

  BddRef value_in(int shared_var, const std::set<int>& values, bool primed) {
    BddRef r = mgr.bfalse();
    for (int v : values) r = mgr.bor(r, value_is(shared_var, v, primed));
    return r;
  }

  void build_domain() {
    domain = mgr.btrue();
    for (std::size_t v = 0; v < ta.shared.size(); ++v) {
      std::set<int> valid;
      for (int a = 0; a < ita.num_intervals((int)v); ++a) valid.insert(a);
      domain = mgr.band(domain, value_in((int)v, valid, false));
    }
  }

  void build_relation() {
    for (std::size_t r = 0; r < ta.rules.size(); ++r) {
      const Rule& rule = ta.rules[r];
      // Guard truth is a pure function of the abstract values.
      BddRef guard_ok = mgr.btrue();
      for (std::size_t v = 0; v < ta.shared.size(); ++v) {
        std::set<int> allowed;
        for (int a = 0; a < ita.num_intervals((int)v); ++a) {
          std::vector<int> abs(ta.shared.size(), 0);
          abs[v] = a;
          bool ok = true;
          for (const auto& atom : rule.guard.conjuncts)
            if (atom.var == (int)v && !ita.atom_true(atom, abs)) {
              ok = false;
              break;
            }
          if (ok) allowed.insert(a);
        }
        if ((int)allowed.size() < ita.num_intervals((int)v))
          guard_ok = mgr.band(guard_ok, value_in((int)v, allowed, false));
      }

      BddRef rel = guard_ok;
      rel = mgr.band(rel, bit_is(rule.from, true, false));
      rel = mgr.band(rel, bit_is(rule.to, true, true));
      if (rule.from == rule.to) rel = mgr.band(rel, bit_is(rule.from, true, true));
      for (int l = 0; l < (int)ta.locations.size(); ++l) {
        if (l == rule.from || l == rule.to) continue;
        BddRef same = mgr.bor(mgr.band(bit_is(l, true, false), bit_is(l, true, true)),
                              mgr.band(bit_is(l, false, false), bit_is(l, false, true)));
        rel = mgr.band(rel, same);
      }
      for (std::size_t v = 0; v < ta.shared.size(); ++v) {
        BddRef step = mgr.bfalse();
        for (int a = 0; a < ita.num_intervals((int)v); ++a) {
          auto [lo, hi] = ita.lift_range(rule, (int)v, a);
          BddRef targets = mgr.bfalse();
          for (int b = lo; b <= hi; ++b) targets = mgr.bor(targets, value_is((int)v, b, true));
          step = mgr.bor(step, mgr.band(value_is((int)v, a, false), targets));
        }
        rel = mgr.band(rel, step);
      }
      rule_rel.push_back(rel);
    }
  }

  BddRef count_formula_bits(const CountFormula& f) {
    switch (f.op) {
      case CountFormula::Op::True: return mgr.btrue();
      case CountFormula::Op::False: return mgr.bfalse();
      case CountFormula::Op::Atom:
        switch (f.atom.kind) {
          case CountAtom::Kind::Ge: return bit_is(f.atom.loc, true, false);
          case CountAtom::Kind::Eq0: return bit_is(f.atom.loc, false, false);
          case CountAtom::Kind::Le: return mgr.btrue();  // over-approximation
        }
        return mgr.bfalse();
      case CountFormula::Op::And:
      case CountFormula::Op::Or: {
        BddRef acc = f.op == CountFormula::Op::And ? mgr.btrue() : mgr.bfalse();
        for (const auto& c : f.children) {
          BddRef k = count_formula_bits(c);
          acc = f.op == CountFormula::Op::And ? mgr.band(acc, k) : mgr.bor(acc, k);
        }
        return acc;
      }
    }
    return mgr.bfalse();
  }

  BddRef gform_bits(const GuardFormula& f) {
    switch (f.op) {
      case GuardFormula::Op::True: return mgr.btrue();
      case GuardFormula::Op::False: return mgr.bfalse();
      case GuardFormula::Op::Atom: {
        std::set<int> allowed;
        for (int a = 0; a < ita.num_intervals(f.atom.var); ++a) {
          std::vector<int> abs(ta.shared.size(), 0);
          abs[f.atom.var] = a;
          if (ita.atom_true(f.atom, abs)) allowed.insert(a);
        }
        return value_in(f.atom.var, allowed, false);
      }
      case GuardFormula::Op::And:
      case GuardFormula::Op::Or: {
        BddRef acc = f.op == GuardFormula::Op::And ? mgr.btrue() : mgr.bfalse();
        for (const auto& c : f.children) {
          BddRef k = gform_bits(c);
          acc = f.op == GuardFormula::Op::And ? mgr.band(acc, k) : mgr.bor(acc, k);
        }
        return acc;
      }
    }
    return mgr.bfalse();
  }

  /// Abstract error states: count atoms over-approximated on emptiness bits,
  /// guard atoms exact on abstract values.
  BddRef error_set(const SafetySpec& spec) {
    ErrorCondition err = error_condition(spec);
    BddRef e = mgr.bfalse();
    for (const auto& d : err.disjuncts)
      e = mgr.bor(e, mgr.band(gform_bits(d.guard), count_formula_bits(d.count)));
    return mgr.band(e, domain);
  }

  /// Abstractions of initial configurations: counts supported on the initial
  /// locations, restriction respected, all abstract values in interval 0.
  BddRef initial_set(const SafetySpec& spec) {
    BddRef s = mgr.btrue();
    for (int l = 0; l < (int)ta.locations.size(); ++l)
      if (!ta.is_initial_location(l)) s = mgr.band(s, bit_is(l, false, false));
    if (spec.init_restriction) s = mgr.band(s, count_formula_bits(*spec.init_restriction));
    for (std::size_t v = 0; v < ta.shared.size(); ++v)
      s = mgr.band(s, value_is((int)v, 0, false));
    return s;
  }

  BddRef preimage(BddRef rel, BddRef states) {
    BddRef primed = mgr.rename(states, to_primed);
    return mgr.exists(mgr.band(rel, primed), primed_mask);
  }

  BddRef successors(BddRef rel, BddRef states) {
    BddRef img = mgr.exists(mgr.band(rel, states), unprimed_mask);
    return mgr.rename(img, to_unprimed);
  }

  // Decoding of an enumerated unprimed assignment.
  struct State {
    std::vector<int> bits;
    std::vector<int> abstract;
  };
  State decode(const std::vector<int>& values) const {
    State s;
    s.bits.resize(ta.locations.size());
    for (std::size_t l = 0; l < ta.locations.size(); ++l) s.bits[l] = values[l];
    s.abstract.resize(ta.shared.size());
    for (std::size_t v = 0; v < ta.shared.size(); ++v) {
      int a = 0;
      for (int j = 0; j < shared_width[v]; ++j) a |= values[shared_base[v] + j] << j;
      s.abstract[v] = a;
    }
    return s;
  }

  BddRef state_cube(const State& s) {
    std::vector<int> assignment(2 * num_bits, -1);
    for (std::size_t l = 0; l < ta.locations.size(); ++l) assignment[2 * l] = s.bits[l];
    for (std::size_t v = 0; v < ta.shared.size(); ++v)
      for (int j = 0; j < shared_width[v]; ++j)
        assignment[2 * (shared_base[v] + j)] = (s.abstract[v] >> j) & 1;
    return mgr.cube(assignment);
  }
};

struct OrderSearch {
  ZcsSpace& space;
  const SafetySpec& spec;
  smt::SolverSession& session;
  const ZcsOptions& options;
  std::vector<BddRef> layers;  // layer 0 = error states
  BddRef bwd_reachable = 0;
  std::int64_t expansions = 0;
  bool saw_unknown = false;
  std::optional<Trace> found;

  std::int64_t max_len() const {
    if (options.max_path_len > 0) return options.max_path_len;
    int max_intervals = 1;
    for (std::size_t v = 0; v < space.ta.shared.size(); ++v)
      max_intervals = std::max(max_intervals, space.ita.num_intervals((int)v));
    return 10ll * (std::int64_t)space.ta.locations.size() * max_intervals;
  }

  int layer_of(BddRef cube) const {
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (!space.mgr.is_false(space.mgr.band(layers[i], cube))) return (int)i;
    return -1;
  }

  // Backward exploration from the abstract error states to a fixed point.
  void build_layers(BddRef error, BddRef full_rel) {
    layers.push_back(error);
    bwd_reachable = error;
    for (;;) {
      BddRef pre = space.preimage(full_rel, layers.back());
      pre = space.mgr.band(pre, space.domain);
      BddRef fresh = space.mgr.bdiff(pre, bwd_reachable);
      if (space.mgr.is_false(fresh)) break;
      layers.push_back(fresh);
      bwd_reachable = space.mgr.bor(bwd_reachable, fresh);
    }
  }

  NodeAnnotation annotation(const ZcsSpace::State& s) const {
    NodeAnnotation a;
    a.abstract = s.abstract;
    a.bits = s.bits;
    return a;
  }

  // Paths through the layered error graph: each step moves to a state
  // strictly closer to the error set, so depth is bounded by the layer
  // index. Prefix infeasibility prunes whole subtrees.
  bool dfs_descend(PathQuery& pq, BddRef state_cube, int layer, BddRef error) {
    if (++expansions > options.max_expansions) throw BudgetHit{};
    if (layer == 0) {
      if (space.mgr.is_false(space.mgr.band(state_cube, error))) return false;
      smt::SmtResult r = pq.check_with_error();
      if (r.is_sat()) {
        found = pq.trace_from_model(r);
        return true;
      }
      if (r.is_unknown()) saw_unknown = true;
      return false;
    }
    for (std::size_t ri = 0; ri < space.ta.rules.size(); ++ri) {
      BddRef succ = space.successors(space.rule_rel[ri], state_cube);
      if (space.mgr.is_false(succ)) continue;
      bool stop = false;
      space.mgr.enumerate(succ, space.unprimed_vars, [&](const std::vector<int>& values) {
        ZcsSpace::State next = space.decode(values);
        BddRef next_cube = space.state_cube(next);
        int next_layer = layer_of(next_cube);
        if (next_layer < 0 || next_layer >= layer) return true;  // must descend
        pq.push_step((int)ri, annotation(next));
        smt::SmtResult feas = pq.check();
        if (feas.is_unknown()) saw_unknown = true;
        if (!feas.is_unsat()) {
          if (dfs_descend(pq, next_cube, next_layer, error)) {
            stop = true;
            pq.pop_step();
            return false;
          }
        }
        pq.pop_step();
        return true;
      });
      if (stop) return true;
    }
    return false;
  }

  // Budgeted walk enumeration for the ETA semi-decision regime: revisits
  // allowed, breadth-first over total length, admissible layer pruning.
  bool dfs_walk(PathQuery& pq, BddRef state_cube, std::int64_t remaining, BddRef error) {
    if (++expansions > options.max_expansions) throw BudgetHit{};
    if (remaining == 0) {
      if (space.mgr.is_false(space.mgr.band(state_cube, error))) return false;
      smt::SmtResult r = pq.check_with_error();
      if (r.is_sat()) {
        found = pq.trace_from_model(r);
        return true;
      }
      if (r.is_unknown()) saw_unknown = true;
      return false;
    }
    for (std::size_t ri = 0; ri < space.ta.rules.size(); ++ri) {
      BddRef succ = space.successors(space.rule_rel[ri], state_cube);
      if (space.mgr.is_false(succ)) continue;
      bool stop = false;
      space.mgr.enumerate(succ, space.unprimed_vars, [&](const std::vector<int>& values) {
        ZcsSpace::State next = space.decode(values);
        BddRef next_cube = space.state_cube(next);
        int next_layer = layer_of(next_cube);
        if (next_layer < 0 || next_layer > remaining - 1) return true;
        pq.push_step((int)ri, annotation(next));
        smt::SmtResult feas = pq.check();
        if (feas.is_unknown()) saw_unknown = true;
        if (!feas.is_unsat()) {
          if (dfs_walk(pq, next_cube, remaining - 1, error)) {
            stop = true;
            pq.pop_step();
            return false;
          }
        }
        pq.pop_step();
        return true;
      });
      if (stop) return true;
    }
    return false;
  }

  Verdict run() {
    const bool mta = space.ta.kind == AutomatonKind::Mta;
    BddRef full_rel = space.mgr.bfalse();
    for (BddRef r : space.rule_rel) full_rel = space.mgr.bor(full_rel, r);
    BddRef error = space.error_set(spec);
    BddRef initial = space.initial_set(spec);
    build_layers(error, full_rel);

    BddRef start_states = space.mgr.band(initial, bwd_reachable);
    if (std::getenv("TAMC_DEBUG_ZCS")) {
      auto cnt = [&](BddRef s) {
        return space.mgr.count(s) >> (std::uint64_t)space.num_bits;
      };
      std::cerr << "[zcs] order " << space.ita.order.str(space.ta) << "\n"
                << "[zcs]   error=" << cnt(error) << " initial=" << cnt(initial)
                << " bwd=" << cnt(bwd_reachable) << " starts=" << cnt(start_states)
                << " layers=" << layers.size() << "\n";
    }
    if (space.mgr.is_false(start_states)) return Verdict::safe();

    // Start states in order of increasing distance to the error set.
    std::vector<std::pair<int, ZcsSpace::State>> starts;
    space.mgr.enumerate(start_states, space.unprimed_vars,
                        [&](const std::vector<int>& values) {
                          ZcsSpace::State s = space.decode(values);
                          starts.emplace_back(layer_of(space.state_cube(s)), s);
                          return true;
                        });
    std::stable_sort(starts.begin(), starts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    try {
      for (const auto& [layer, s] : starts) {
        // The length budget governs the ETA semi-decision regime.
        if (!mta && layer > max_len()) continue;
        session.push();
        bool hit = false;
        {
          PathQuery pq(space.ita, spec, session, annotation(s));
          smt::SmtResult base = pq.check();
          if (base.is_unknown()) saw_unknown = true;
          if (!base.is_unsat()) hit = dfs_descend(pq, space.state_cube(s), layer, error);
        }
        session.pop();
        if (hit) return Verdict::unsafe(*found);
      }

      if (!mta) {
        // Counterexamples of an ETA may need to revisit abstract states
        // (rounds); fall back to budgeted walk enumeration.
        std::int64_t limit = max_len();
        for (std::int64_t len = 0; len <= limit; ++len) {
          for (const auto& [layer, s] : starts) {
            if (layer > len) continue;
            session.push();
            bool hit = false;
            {
              PathQuery pq(space.ita, spec, session, annotation(s));
              smt::SmtResult base = pq.check();
              if (base.is_unknown()) saw_unknown = true;
              if (!base.is_unsat()) hit = dfs_walk(pq, space.state_cube(s), len, error);
            }
            session.pop();
            if (hit) return Verdict::unsafe(*found);
          }
        }
        return Verdict::unknown(
            "all abstract error paths up to the length budget are spurious (ETA "
            "semi-decision)");
      }
    } catch (const BudgetHit&) {
      return Verdict::unknown("abstract path enumeration budget exhausted");
    }

    if (saw_unknown)
      return Verdict::unknown("a spuriousness query returned unknown");
    return Verdict::safe();
  }
};

Verdict check_one_order(const ThresholdAutomaton& ta, const SafetySpec& spec,
                        const ThresholdOrder& order, const smt::SessionFactory& sessions,
                        const ZcsOptions& options) {
  IntervalTa ita = build_interval_ta(ta, order);
  ZcsSpace space(ita);
  auto session = sessions.make();
  OrderSearch search{space, spec, *session, options, {}, 0, 0, false, std::nullopt};
  return search.run();
}

}  // namespace

Verdict zcs_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  const smt::SessionFactory& sessions, const ZcsOptions& options) {
  auto enum_session = sessions.make();
  OrderEnumeration orders = enumerate_orders(ta, *enum_session);
  if (orders.unknown) return Verdict::unknown(orders.info);
  if (orders.rc_unsat) return Verdict::safe();  // no admissible parameters

  std::vector<Verdict> verdicts(orders.orders.size());
  if (options.jobs > 1 && orders.orders.size() > 1) {
    std::vector<std::future<Verdict>> futures;
    for (const auto& order : orders.orders)
      futures.push_back(std::async(std::launch::async, [&ta, &spec, &order, &sessions,
                                                        &options]() {
        return check_one_order(ta, spec, order, sessions, options);
      }));
    for (std::size_t i = 0; i < futures.size(); ++i) verdicts[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < orders.orders.size(); ++i)
      verdicts[i] = check_one_order(ta, spec, orders.orders[i], sessions, options);
  }

  // UNSAFE dominates UNKNOWN dominates SAFE; ties resolved by order index.
  for (const auto& v : verdicts)
    if (v.is_unsafe()) return v;
  for (const auto& v : verdicts)
    if (v.is_unknown()) return v;
  return Verdict::safe();
}

}  // namespace tamc
