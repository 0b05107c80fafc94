#include "tamc/oracle.hpp"

#include <deque>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace tamc {
namespace oracle {

namespace {

struct StateKey {
  std::vector<std::int64_t> values;  // counts followed by shared

  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto v : k.values) {
      h ^= (std::size_t)v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

StateKey key_of(const Configuration& c) {
  StateKey k;
  k.values.reserve(c.counts.size() + c.shared.size());
  k.values.insert(k.values.end(), c.counts.begin(), c.counts.end());
  k.values.insert(k.values.end(), c.shared.begin(), c.shared.end());
  return k;
}

void validate_params(const ThresholdAutomaton& ta, const std::vector<std::int64_t>& params) {
  if (params.size() != ta.params.size())
    throw std::invalid_argument("parameter valuation has wrong arity");
  for (auto p : params)
    if (p < 0) throw std::invalid_argument("parameters range over naturals");
  if (!eval_rc(ta, params))
    throw std::invalid_argument("parameter valuation violates the resilience condition");
}

// Reads the process total from an init constraint of the form
// sum of initial-location counts == linear(params). Constraints pinning
// non-initial locations to zero have the same syntactic shape and are
// skipped by the initial-location requirement.
std::optional<std::int64_t> process_total(const ThresholdAutomaton& ta,
                                          const std::vector<std::int64_t>& params) {
  for (const auto& c : ta.init_constraints) {
    if (c.rel != LinearConstraint::Rel::Eq) continue;
    bool shape_ok = true;
    bool has_loc = false;
    Rational rest = c.constant;
    for (const auto& t : c.terms) {
      if (t.sym == SymKind::Loc) {
        if (t.coeff != Rational(1) || !ta.is_initial_location(t.index)) {
          shape_ok = false;
          break;
        }
        has_loc = true;
      } else if (t.sym == SymKind::Param) {
        rest = rest + t.coeff * Rational(params[t.index]);
      } else {
        shape_ok = false;
        break;
      }
    }
    if (!shape_ok || !has_loc) continue;
    // sum(counts) + rest == 0  =>  total = -rest
    Rational total = -rest;
    if (!total.is_integer()) return std::nullopt;
    return total.num();
  }
  return std::nullopt;
}

// Per-variable saturation cap: one above every threshold compared against
// the variable, so all guard truths are constant at and above the cap.
std::vector<std::int64_t> shared_caps(const ThresholdAutomaton& ta,
                                      const std::vector<std::int64_t>& params) {
  std::vector<std::int64_t> caps(ta.shared.size(), 1);
  auto consider = [&](const GuardAtom& a) {
    std::int64_t c = a.threshold.eval(params).ceil();
    if (c + 1 > caps[a.var]) caps[a.var] = c + 1;
  };
  for (const auto& r : ta.rules)
    for (const auto& a : r.guard.conjuncts) consider(a);
  for (const auto& s : ta.specs) {
    std::vector<GuardAtom> atoms;
    for (const auto& p : s.body)
      if (p.gform) p.gform->collect_atoms(atoms);
    for (const auto& a : atoms) consider(a);
  }
  return caps;
}

}  // namespace

std::vector<Configuration> initial_configurations(const ThresholdAutomaton& ta,
                                                  std::vector<std::int64_t> params,
                                                  const CountFormula* init_restriction) {
  validate_params(ta, params);
  auto total = process_total(ta, params);
  if (!total)
    throw std::invalid_argument(
        "init constraints do not fix the process total (expected a constraint of the form "
        "sum of location counts == linear expression over parameters)");
  std::vector<Configuration> out;
  if (*total < 0) return out;

  Configuration base;
  base.counts.assign(ta.locations.size(), 0);
  base.shared.assign(ta.shared.size(), 0);
  base.params = params;

  // All distributions of `total` processes over the initial locations.
  std::vector<int> slots = ta.initial;
  std::vector<std::int64_t> assign(slots.size(), 0);
  auto emit = [&]() {
    Configuration c = base;
    for (std::size_t i = 0; i < slots.size(); ++i) c.counts[slots[i]] = assign[i];
    bool ok = true;
    for (const auto& ic : ta.init_constraints)
      if (!ic.eval(c.counts, c.shared, c.params)) {
        ok = false;
        break;
      }
    if (ok && init_restriction && !init_restriction->eval(c.counts)) ok = false;
    if (ok) out.push_back(std::move(c));
  };
  // Compositions of total into |slots| parts.
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i,
                                                           std::int64_t remaining) {
    if (i + 1 == slots.size()) {
      assign[i] = remaining;
      emit();
      return;
    }
    for (std::int64_t v = 0; v <= remaining; ++v) {
      assign[i] = v;
      rec(i + 1, remaining - v);
    }
  };
  if (!slots.empty()) rec(0, *total);
  return out;
}

Outcome explore(const ThresholdAutomaton& ta, const SafetySpec& spec,
                std::vector<std::int64_t> params, std::optional<std::int64_t> step_bound) {
  validate_params(ta, params);
  const bool mta = ta.kind == AutomatonKind::Mta;
  if (!mta && !step_bound)
    throw std::invalid_argument("exploring an ETA requires a step bound");

  ErrorCondition err = error_condition(spec);
  const CountFormula* restriction =
      spec.init_restriction ? &*spec.init_restriction : nullptr;

  std::vector<std::int64_t> caps;
  if (mta) caps = shared_caps(ta, params);

  struct Node {
    Configuration config;
    std::int64_t parent;  // -1 for roots
    int rule;
    std::int64_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_map<StateKey, std::int64_t, StateKeyHash> seen;
  std::deque<std::int64_t> queue;
  bool bound_hit = false;

  auto make_trace = [&](std::int64_t idx) {
    std::vector<int> fired;
    for (std::int64_t i = idx; nodes[i].parent >= 0; i = nodes[i].parent)
      fired.push_back(nodes[i].rule);
    Trace t;
    t.params = params;
    t.spec_name = spec.name;
    for (auto it = fired.rbegin(); it != fired.rend(); ++it) {
      if (!t.steps.empty() && t.steps.back().rule == *it)
        t.steps.back().count += 1;
      else
        t.steps.push_back({*it, 1});
    }
    return t;
  };

  auto push = [&](Configuration c, std::int64_t parent, int rule,
                  std::int64_t depth) -> std::optional<Outcome> {
    StateKey k = key_of(c);
    if (seen.count(k)) return std::nullopt;
    std::int64_t idx = (std::int64_t)nodes.size();
    seen.emplace(std::move(k), idx);
    bool is_err = err.eval(c.counts, c.shared, c.params);
    nodes.push_back({std::move(c), parent, rule, depth});
    if (is_err) {
      Outcome o;
      o.status = Outcome::Status::Unsafe;
      o.trace = make_trace(idx);
      o.configs_seen = nodes.size();
      return o;
    }
    queue.push_back(idx);
    return std::nullopt;
  };

  for (auto& init : initial_configurations(ta, params, restriction)) {
    if (auto o = push(std::move(init), -1, -1, 0)) return *o;
  }

  while (!queue.empty()) {
    std::int64_t idx = queue.front();
    queue.pop_front();
    std::int64_t depth = nodes[idx].depth;
    if (step_bound && depth >= *step_bound) {
      bound_hit = true;
      continue;
    }
    for (const auto& rule : ta.rules) {
      Configuration current = nodes[idx].config;  // nodes may reallocate below
      FireResult r = fire(ta, rule, current);
      if (!r.ok()) continue;
      Configuration next = std::move(*r.config);
      if (mta)
        for (std::size_t v = 0; v < next.shared.size(); ++v)
          if (next.shared[v] > caps[v]) next.shared[v] = caps[v];
      if (auto o = push(std::move(next), idx, rule.id, depth + 1)) return *o;
    }
  }

  Outcome o;
  o.status = bound_hit ? Outcome::Status::BoundHit : Outcome::Status::Safe;
  o.configs_seen = nodes.size();
  return o;
}

ReplayResult replay(const ThresholdAutomaton& ta, const Trace& trace) {
  if (trace.params.size() != ta.params.size()) return {ReplayResult::Status::BadParams, {}, -1};
  for (auto p : trace.params)
    if (p < 0) return {ReplayResult::Status::BadParams, {}, -1};
  if (!eval_rc(ta, trace.params)) return {ReplayResult::Status::BadParams, {}, -1};

  const SafetySpec* spec = ta.find_spec(trace.spec_name);
  if (!spec) return {ReplayResult::Status::UnknownSpec, {}, -1};
  ErrorCondition err = error_condition(*spec);
  const CountFormula* restriction =
      spec->init_restriction ? &*spec->init_restriction : nullptr;

  std::vector<Configuration> inits;
  try {
    inits = initial_configurations(ta, trace.params, restriction);
  } catch (const std::invalid_argument&) {
    return {ReplayResult::Status::NoInitialConfig, {}, -1};
  }
  if (inits.empty()) return {ReplayResult::Status::NoInitialConfig, {}, -1};

  ReplayResult best{ReplayResult::Status::StepNotEnabled, {}, -1};
  for (const auto& init : inits) {
    Configuration c = init;
    std::int64_t firing = 0;
    bool failed = false;
    for (const auto& step : trace.steps) {
      const Rule* rule_ptr = ta.find_rule(step.rule);
      if (!rule_ptr || step.count < 1)
        return {ReplayResult::Status::StepNotEnabled, {}, firing};
      const Rule& rule = *rule_ptr;
      for (std::int64_t i = 0; i < step.count; ++i) {
        FireResult r = fire(ta, rule, c);
        if (!r.ok()) {
          if (firing > best.failed_firing)
            best = {ReplayResult::Status::StepNotEnabled, {}, firing};
          failed = true;
          break;
        }
        c = std::move(*r.config);
        ++firing;
      }
      if (failed) break;
    }
    if (failed) continue;
    if (err.eval(c.counts, c.shared, c.params))
      return {ReplayResult::Status::Ok, std::move(c), -1};
    if (best.status != ReplayResult::Status::Ok && firing >= best.failed_firing)
      best = {ReplayResult::Status::ErrorConditionUnsatisfied, {}, firing};
  }
  return best;
}

}  // namespace oracle
}  // namespace tamc
