#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tamc/oracle.hpp"
#include "tamc/parser.hpp"

namespace tamc::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(TAMC_FIXTURE_DIR) + "/" + name;
}

inline ThresholdAutomaton load_fixture(const std::string& name) {
  ParseResult r = parse_file(fixture_path(name));
  if (!r.ok()) {
    std::ostringstream msg;
    msg << "fixture " << name << " failed to parse:";
    for (const auto& d : r.diagnostics) msg << "\n  " << d.str();
    throw std::runtime_error(msg.str());
  }
  return std::move(*r.automaton);
}

inline ThresholdAutomaton parse_or_throw(const std::string& source,
                                         const std::string& origin = "<test>.ta") {
  ParseResult r = parse(source, origin);
  if (!r.ok()) {
    std::ostringstream msg;
    msg << "test source failed to parse:";
    for (const auto& d : r.diagnostics) msg << "\n  " << d.str();
    throw std::runtime_error(msg.str());
  }
  return std::move(*r.automaton);
}

/// Deterministic xorshift generator for property-style tests.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + (std::int64_t)(next() % (std::uint64_t)(hi - lo + 1));
  }
  bool chance(int percent) { return range(0, 99) < percent; }
};

/// All parameter valuations with components <= cap satisfying RC.
inline std::vector<std::vector<std::int64_t>> rc_valuations(const ThresholdAutomaton& ta,
                                                            std::int64_t cap) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> current(ta.params.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == current.size()) {
      if (eval_rc(ta, current)) out.push_back(current);
      return;
    }
    for (std::int64_t v = 0; v <= cap; ++v) {
      current[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace tamc::test
