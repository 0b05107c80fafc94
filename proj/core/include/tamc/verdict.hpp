#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tamc/automaton.hpp"

namespace tamc {

/// A replayable counterexample: a parameter valuation plus a firing sequence,
/// where each step means `count` consecutive firings of the same rule.
struct Trace {
  struct Step {
    int rule = 0;
    std::int64_t count = 1;
  };

  std::vector<std::int64_t> params;  // indexed by the automaton's parameters
  std::vector<Step> steps;
  std::string spec_name;

  std::int64_t total_firings() const {
    std::int64_t t = 0;
    for (const auto& s : steps) t += s.count;
    return t;
  }

  std::string params_str(const ThresholdAutomaton& ta) const {
    std::string out;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) out += ",";
      out += ta.params[i] + "=" + std::to_string(params[i]);
    }
    return out;
  }
};

struct Verdict {
  enum class Kind { Safe, Unsafe, Unknown };

  Kind kind = Kind::Unknown;
  std::optional<Trace> trace;  // present iff Unsafe
  std::string reason;          // diagnostic detail for Unknown

  static Verdict safe() { return {Kind::Safe, std::nullopt, ""}; }
  static Verdict unsafe(Trace t) { return {Kind::Unsafe, std::move(t), ""}; }
  static Verdict unknown(std::string reason) {
    return {Kind::Unknown, std::nullopt, std::move(reason)};
  }

  bool is_safe() const { return kind == Kind::Safe; }
  bool is_unsafe() const { return kind == Kind::Unsafe; }
  bool is_unknown() const { return kind == Kind::Unknown; }

  const char* name() const {
    switch (kind) {
      case Kind::Safe: return "SAFE";
      case Kind::Unsafe: return "UNSAFE";
      case Kind::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
  }
};

}  // namespace tamc
