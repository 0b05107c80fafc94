#include "tamc/config.hpp"

namespace tamc {

bool eval_rc(const ThresholdAutomaton& ta, std::span<const std::int64_t> params) {
  static const std::vector<std::int64_t> kNoCounts;
  for (const auto& c : ta.resilience)
    if (!c.eval(kNoCounts, kNoCounts, params)) return false;
  return true;
}

bool enabled(const ThresholdAutomaton& ta, const Rule& rule, const Configuration& config) {
  (void)ta;
  if (config.counts[rule.from] <= 0) return false;
  return rule.guard.eval(config.shared, config.params);
}

FireResult fire(const ThresholdAutomaton& ta, const Rule& rule, const Configuration& config) {
  if (!enabled(ta, rule, config)) return {std::nullopt, FireError::NotEnabled};
  Configuration next = config;
  if (rule.from != rule.to) {
    next.counts[rule.from] -= 1;
    next.counts[rule.to] += 1;
  }
  for (std::size_t v = 0; v < next.shared.size(); ++v) {
    if (rule.resets.count((int)v)) {
      next.shared[v] = 0;
    } else {
      next.shared[v] += rule.updates[v];
      if (next.shared[v] < 0) return {std::nullopt, FireError::NegativeShared};
    }
  }
  return {std::move(next), std::nullopt};
}

bool is_initial(const ThresholdAutomaton& ta, const Configuration& config) {
  for (auto g : config.shared)
    if (g != 0) return false;
  for (std::size_t l = 0; l < config.counts.size(); ++l)
    if (config.counts[l] > 0 && !ta.is_initial_location((int)l)) return false;
  for (const auto& c : ta.init_constraints)
    if (!c.eval(config.counts, config.shared, config.params)) return false;
  return true;
}

}  // namespace tamc
