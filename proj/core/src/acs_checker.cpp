#include "tamc/acs_checker.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <set>

#include "tamc/checker.hpp"
#include "tamc/concretize.hpp"

namespace tamc {

bool acs_leq(const AcsConfig& a, const AcsConfig& b) {
  if (a.abstract != b.abstract) return false;
  for (std::size_t l = 0; l < a.counts.size(); ++l)
    if (a.counts[l] > b.counts[l]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// SubsumptionIndex
// ---------------------------------------------------------------------------

void SubsumptionIndex::insert(const AcsConfig& c, int id) {
  CountNode* node = &roots_[c.abstract];
  for (auto count : c.counts) {
    auto& child = node->children[count];
    if (!child) child = std::make_unique<CountNode>();
    node = child.get();
  }
  node->ids.push_back(id);
  ++size_;
}

bool SubsumptionIndex::exists_leq(const AcsConfig& q) const {
  auto it = roots_.find(q.abstract);
  if (it == roots_.end()) return false;
  // DFS over children with keys <= the query count at each depth.
  std::function<bool(const CountNode*, std::size_t)> rec = [&](const CountNode* node,
                                                               std::size_t depth) {
    if (depth == q.counts.size()) return !node->ids.empty();
    for (const auto& [count, child] : node->children) {
      if (count > q.counts[depth]) break;
      if (rec(child.get(), depth + 1)) return true;
    }
    return false;
  };
  return rec(&it->second, 0);
}

std::vector<int> SubsumptionIndex::remove_geq(const AcsConfig& q) {
  std::vector<int> removed;
  auto it = roots_.find(q.abstract);
  if (it == roots_.end()) return removed;
  std::function<void(CountNode*, std::size_t)> rec = [&](CountNode* node, std::size_t depth) {
    if (depth == q.counts.size()) {
      removed.insert(removed.end(), node->ids.begin(), node->ids.end());
      size_ -= node->ids.size();
      node->ids.clear();
      return;
    }
    for (auto child_it = node->children.lower_bound(q.counts[depth]);
         child_it != node->children.end();) {
      rec(child_it->second.get(), depth + 1);
      bool empty = child_it->second->children.empty() && child_it->second->ids.empty();
      child_it = empty ? node->children.erase(child_it) : std::next(child_it);
    }
  };
  rec(&it->second, 0);
  if (it->second.children.empty() && it->second.ids.empty()) roots_.erase(it);
  return removed;
}

// ---------------------------------------------------------------------------
// UpwardClosedSet
// ---------------------------------------------------------------------------

bool UpwardClosedSet::insert(const AcsConfig& c) {
  if (index_.exists_leq(c)) return false;
  for (int id : index_.remove_geq(c)) alive_[id] = false;
  int id = (int)storage_.size();
  storage_.push_back(c);
  alive_.push_back(true);
  index_.insert(c, id);
  return true;
}

std::vector<AcsConfig> UpwardClosedSet::basis() const {
  std::vector<AcsConfig> out;
  for (std::size_t i = 0; i < storage_.size(); ++i)
    if (alive_[i]) out.push_back(storage_[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Predecessor computation
// ---------------------------------------------------------------------------

namespace {

// Source abstract values from which one firing of the rule can land on
// `target` for variable var (inverse of IntervalTa::lift_range).
std::vector<int> source_values(const IntervalTa& ita, const Rule& rule, int var, int target) {
  std::vector<int> out;
  int m = ita.num_intervals(var) - 1;
  if (rule.resets.count(var)) {
    if (target != 0) return out;
    for (int a = 0; a <= m; ++a) out.push_back(a);
    return out;
  }
  std::int64_t u = rule.updates[var];
  if (u == 0) {
    out.push_back(target);
    return out;
  }
  if (u > 0) {
    for (int a = (int)std::max<std::int64_t>(0, target - u); a <= target; ++a) out.push_back(a);
    return out;
  }
  for (int a = target; a <= (int)std::min<std::int64_t>(m, target - u); ++a) out.push_back(a);
  return out;
}

}  // namespace

std::vector<AcsConfig> pred_basis_elements(const AcsConfig& target, const IntervalTa& ita) {
  const ThresholdAutomaton& ta = *ita.ta;
  std::vector<AcsConfig> out;
  for (const auto& rule : ta.rules) {
    // Candidate source abstract values, per variable, then crossed.
    std::vector<std::vector<int>> per_var;
    bool possible = true;
    for (std::size_t v = 0; v < ta.shared.size() && possible; ++v) {
      per_var.push_back(source_values(ita, rule, (int)v, target.abstract[v]));
      if (per_var.back().empty()) possible = false;
    }
    if (!possible) continue;

    std::vector<int> abs(ta.shared.size(), 0);
    std::function<void(std::size_t)> cross = [&](std::size_t v) {
      if (v == ta.shared.size()) {
        if (!ita.guard_true(rule.guard, abs)) return;
        AcsConfig pred;
        pred.abstract = abs;
        pred.counts = target.counts;
        if (rule.from == rule.to) {
          pred.counts[rule.from] = std::max<std::int64_t>(pred.counts[rule.from], 1);
        } else {
          pred.counts[rule.from] += 1;
          pred.counts[rule.to] = std::max<std::int64_t>(pred.counts[rule.to] - 1, 0);
        }
        out.push_back(std::move(pred));
        return;
      }
      for (int a : per_var[v]) {
        abs[v] = a;
        cross(v + 1);
      }
    };
    cross(0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

namespace {

// Minimal count vectors satisfying a positive formula of Ge atoms.
std::vector<std::vector<std::int64_t>> count_minimal_bases(const CountFormula& f,
                                                           std::size_t num_locs) {
  switch (f.op) {
    case CountFormula::Op::True: return {std::vector<std::int64_t>(num_locs, 0)};
    case CountFormula::Op::False: return {};
    case CountFormula::Op::Atom: {
      std::vector<std::int64_t> v(num_locs, 0);
      v[f.atom.loc] = f.atom.bound;
      return {v};
    }
    case CountFormula::Op::Or: {
      std::vector<std::vector<std::int64_t>> out;
      for (const auto& c : f.children)
        for (auto& b : count_minimal_bases(c, num_locs)) out.push_back(std::move(b));
      return out;
    }
    case CountFormula::Op::And: {
      std::vector<std::vector<std::int64_t>> acc{std::vector<std::int64_t>(num_locs, 0)};
      for (const auto& c : f.children) {
        std::vector<std::vector<std::int64_t>> next;
        for (const auto& b : count_minimal_bases(c, num_locs))
          for (const auto& a : acc) {
            std::vector<std::int64_t> merged(num_locs);
            for (std::size_t l = 0; l < num_locs; ++l) merged[l] = std::max(a[l], b[l]);
            next.push_back(std::move(merged));
          }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

struct Element {
  AcsConfig cfg;
  std::vector<std::pair<int, int>> edges;  // (rule index, covered element id)
  bool is_seed = false;  // seeded from the error condition
};

Verdict check_one_order(const ThresholdAutomaton& ta, const SafetySpec& spec,
                        const ThresholdOrder& order, const smt::SessionFactory& sessions,
                        const AcsOptions& options) {
  IntervalTa ita = build_interval_ta(ta, order);
  ErrorCondition err = error_condition(spec);
  const bool mta = ta.kind == AutomatonKind::Mta;

  std::vector<Element> elements;
  SubsumptionIndex index;
  std::map<std::pair<std::vector<std::int64_t>, std::vector<int>>, int> exact;
  std::deque<int> worklist;

  // A candidate predecessor either attaches a new error-graph edge to an
  // existing identical element, is dropped when strictly subsumed, or joins
  // the basis. Elements subsumed later stay in storage so recorded edges
  // remain traversable.
  auto add_pred = [&](AcsConfig cfg, int rule_index, int target) {
    auto key = std::make_pair(cfg.counts, cfg.abstract);
    auto it = exact.find(key);
    if (it != exact.end()) {
      auto& edges = elements[it->second].edges;
      std::pair<int, int> edge{rule_index, target};
      if (std::find(edges.begin(), edges.end(), edge) == edges.end())
        edges.push_back(edge);
      return;
    }
    if (index.exists_leq(cfg)) return;
    index.remove_geq(cfg);
    int id = (int)elements.size();
    elements.push_back({cfg, {{rule_index, target}}, false});
    exact.emplace(std::move(key), id);
    index.insert(elements.back().cfg, id);
    worklist.push_back(id);
  };

  auto add_seed = [&](AcsConfig cfg) {
    auto key = std::make_pair(cfg.counts, cfg.abstract);
    if (exact.count(key)) return;
    if (index.exists_leq(cfg)) return;
    index.remove_geq(cfg);
    int id = (int)elements.size();
    elements.push_back({cfg, {}, true});
    exact.emplace(std::move(key), id);
    index.insert(elements.back().cfg, id);
    worklist.push_back(id);
  };

  // Seed from the error condition: count atoms give minimal count vectors,
  // guard atoms pin abstract valuations (one seed per satisfying valuation).
  {
    std::vector<std::vector<int>> abstract_space{{}};
    for (std::size_t v = 0; v < ta.shared.size(); ++v) {
      std::vector<std::vector<int>> next;
      for (const auto& partial : abstract_space)
        for (int a = 0; a < ita.num_intervals((int)v); ++a) {
          auto ext = partial;
          ext.push_back(a);
          next.push_back(std::move(ext));
        }
      abstract_space = std::move(next);
    }
    for (const auto& d : err.disjuncts) {
      auto bases = count_minimal_bases(d.count, ta.locations.size());
      for (const auto& abs : abstract_space) {
        if (!ita.gform_true(d.guard, abs)) continue;
        for (const auto& counts : bases) add_seed({counts, abs});
      }
    }
  }

  // Backward fixed point.
  while (!worklist.empty()) {
    if ((std::int64_t)elements.size() > options.max_basis_size)
      return Verdict::unknown("ACS basis budget exhausted");
    int id = worklist.front();
    worklist.pop_front();
    const AcsConfig target = elements[id].cfg;  // elements may reallocate
    for (std::size_t ri = 0; ri < ta.rules.size(); ++ri) {
      const Rule& rule = ta.rules[ri];
      std::vector<std::vector<int>> per_var;
      bool possible = true;
      for (std::size_t v = 0; v < ta.shared.size() && possible; ++v) {
        per_var.push_back(source_values(ita, rule, (int)v, target.abstract[v]));
        if (per_var.back().empty()) possible = false;
      }
      if (!possible) continue;
      std::vector<int> abs(ta.shared.size(), 0);
      std::function<void(std::size_t)> cross = [&](std::size_t v) {
        if (v == ta.shared.size()) {
          if (!ita.guard_true(rule.guard, abs)) return;
          AcsConfig pred;
          pred.abstract = abs;
          pred.counts = target.counts;
          if (rule.from == rule.to) {
            pred.counts[rule.from] = std::max<std::int64_t>(pred.counts[rule.from], 1);
          } else {
            pred.counts[rule.from] += 1;
            pred.counts[rule.to] = std::max<std::int64_t>(pred.counts[rule.to] - 1, 0);
          }
          add_pred(std::move(pred), (int)ri, id);
          return;
        }
        for (int a : per_var[v]) {
          abs[v] = a;
          cross(v + 1);
        }
      };
      cross(0);
    }
  }

  // Initial intersection: counts supported on the initial locations (others
  // zero), abstract values all zero, restriction satisfiable above the
  // element counts. Init constraints are enforced by the spuriousness
  // query, keeping this phase order-theoretic.
  std::vector<int> initial_compatible;
  for (std::size_t id = 0; id < elements.size(); ++id) {
    const AcsConfig& c = elements[id].cfg;
    bool ok = true;
    for (int a : c.abstract)
      if (a != 0) ok = false;
    if (!ok) continue;
    std::map<int, std::int64_t> mins;
    std::set<int> zeros;
    for (int l = 0; l < (int)ta.locations.size(); ++l) {
      if (!ta.is_initial_location(l)) {
        if (c.counts[l] > 0) {
          ok = false;
          break;
        }
        zeros.insert(l);
      } else if (c.counts[l] > 0) {
        mins[l] = c.counts[l];
      }
    }
    if (!ok) continue;
    if (spec.init_restriction &&
        !count_formula_satisfiable(*spec.init_restriction, mins, zeros))
      continue;
    initial_compatible.push_back((int)id);
  }
  if (initial_compatible.empty()) return Verdict::safe();

  // Depth-first counterexample search over the error graph, incremental
  // spuriousness over path prefixes with push/pop; an infeasible prefix
  // prunes its whole subtree.
  auto session = sessions.make();
  bool saw_unknown = false;
  std::optional<Trace> found;
  std::vector<char> on_path(elements.size(), 0);

  std::function<bool(PathQuery&, int)> dfs = [&](PathQuery& pq, int id) -> bool {
    const Element& e = elements[id];
    if (e.is_seed) {
      // The error side; longer paths may still concretize when this one is
      // spurious, so the search continues through any recorded edges.
      smt::SmtResult full = pq.check_with_error();
      if (full.is_sat()) {
        found = pq.trace_from_model(full);
        return true;
      }
      if (full.is_unknown()) saw_unknown = true;
    }
    for (const auto& [rule_index, target] : e.edges) {
      if (on_path[target]) continue;
      NodeAnnotation ann;
      ann.abstract = elements[target].cfg.abstract;
      ann.min_counts = elements[target].cfg.counts;
      pq.push_step(rule_index, ann);
      smt::SmtResult r = pq.check();
      if (r.is_unknown()) saw_unknown = true;
      bool hit = false;
      if (!r.is_unsat()) {
        on_path[target] = 1;
        hit = dfs(pq, target);
        on_path[target] = 0;
      }
      pq.pop_step();
      if (hit) return true;
    }
    return false;
  };

  for (int id : initial_compatible) {
    session->push();
    bool hit = false;
    {
      NodeAnnotation init_ann;
      init_ann.abstract = elements[id].cfg.abstract;
      init_ann.min_counts = elements[id].cfg.counts;
      PathQuery pq(ita, spec, *session, init_ann);
      smt::SmtResult base = pq.check();
      if (base.is_unknown()) saw_unknown = true;
      if (!base.is_unsat()) {
        on_path.assign(elements.size(), 0);
        on_path[id] = 1;
        hit = dfs(pq, id);
      }
    }
    session->pop();
    if (hit) return Verdict::unsafe(std::move(*found));
  }

  if (!mta)
    return Verdict::unknown(
        "all abstract error paths are spurious at this basis (ETA semi-decision)");
  if (saw_unknown) return Verdict::unknown("a spuriousness query returned unknown");
  return Verdict::safe();
}

}  // namespace

Verdict acs_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  const smt::SessionFactory& sessions, const AcsOptions& options) {
  ErrorCondition err = error_condition(spec);
  if (err.has_emptiness_atom())
    throw UnsupportedCheck(
        "the ACS checker does not support specifications that require target locations to be "
        "empty (count = 0 or bounded-count atoms in the error condition): the well-quasi "
        "order is not precise for locations in these cases");

  auto enum_session = sessions.make();
  OrderEnumeration orders = enumerate_orders(ta, *enum_session);
  if (orders.unknown) return Verdict::unknown(orders.info);
  if (orders.rc_unsat) return Verdict::safe();

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

  for (const auto& v : verdicts)
    if (v.is_unsafe()) return v;
  for (const auto& v : verdicts)
    if (v.is_unknown()) return v;
  return Verdict::safe();
}

}  // namespace tamc
