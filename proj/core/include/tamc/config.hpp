#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tamc/automaton.hpp"

namespace tamc {

/// A configuration (k, g, p): process counts per location, shared-variable
/// values, parameter valuation. Values are immutable in place; fire()
/// produces a fresh configuration.
struct Configuration {
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> shared;
  std::vector<std::int64_t> params;

  friend bool operator==(const Configuration&, const Configuration&) = default;

  std::int64_t total_processes() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

/// p |= RC: all resilience constraints hold under the valuation.
bool eval_rc(const ThresholdAutomaton& ta, std::span<const std::int64_t> params);

/// A rule is enabled iff its source location is populated and every guard
/// conjunct holds under (g, p).
bool enabled(const ThresholdAutomaton& ta, const Rule& rule, const Configuration& config);

enum class FireError { NotEnabled, NegativeShared };

struct FireResult {
  std::optional<Configuration> config;
  std::optional<FireError> error;

  bool ok() const { return config.has_value(); }
};

/// Fires `rule` once: moves one process from->to, applies resets then
/// updates. An update that would drive a shared variable below zero yields
/// NegativeShared (the firing is illegal, treated as not enabled).
FireResult fire(const ThresholdAutomaton& ta, const Rule& rule, const Configuration& config);

/// True iff g = 0, counts are supported on the initial locations, and all
/// init constraints hold.
bool is_initial(const ThresholdAutomaton& ta, const Configuration& config);

}  // namespace tamc
