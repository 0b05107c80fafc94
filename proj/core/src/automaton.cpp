#include "tamc/automaton.hpp"

#include <algorithm>
#include <set>

namespace tamc {

namespace {
std::optional<int> index_of(const std::vector<std::string>& names, const std::string& n) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == n) return (int)i;
  return std::nullopt;
}
}  // namespace

std::optional<int> ThresholdAutomaton::location_index(const std::string& n) const {
  return index_of(locations, n);
}
std::optional<int> ThresholdAutomaton::shared_index(const std::string& n) const {
  return index_of(shared, n);
}
std::optional<int> ThresholdAutomaton::param_index(const std::string& n) const {
  return index_of(params, n);
}

const SafetySpec* ThresholdAutomaton::find_spec(const std::string& n) const {
  for (const auto& s : specs)
    if (s.name == n) return &s;
  return nullptr;
}

const Rule* ThresholdAutomaton::find_rule(int id) const {
  for (const auto& r : rules)
    if (r.id == id) return &r;
  return nullptr;
}

std::optional<std::string> ThresholdAutomaton::validate() const {
  if (locations.empty()) return "automaton has no locations";
  if (initial.empty()) return "automaton has no initial locations";
  std::set<std::string> seen;
  for (const auto& n : locations)
    if (!seen.insert(n).second) return "duplicate identifier: " + n;
  for (const auto& n : shared)
    if (!seen.insert(n).second) return "duplicate identifier: " + n;
  for (const auto& n : params)
    if (!seen.insert(n).second) return "duplicate identifier: " + n;
  for (int i : initial)
    if (i < 0 || i >= (int)locations.size()) return "initial location index out of range";
  std::set<int> rule_ids;
  for (const auto& r : rules)
    if (!rule_ids.insert(r.id).second) return "duplicate rule id " + std::to_string(r.id);
  for (const auto& r : rules) {
    if (r.from < 0 || r.from >= (int)locations.size() || r.to < 0 ||
        r.to >= (int)locations.size())
      return "rule " + std::to_string(r.id) + " endpoint out of range";
    if (r.updates.size() != shared.size())
      return "rule " + std::to_string(r.id) + " update vector has wrong arity";
    for (int v : r.resets) {
      if (v < 0 || v >= (int)shared.size())
        return "rule " + std::to_string(r.id) + " resets unknown variable";
      if (r.updates[v] != 0)
        return "rule " + std::to_string(r.id) + " both resets and updates a variable";
    }
    for (const auto& atom : r.guard.conjuncts)
      if (atom.var < 0 || atom.var >= (int)shared.size())
        return "rule " + std::to_string(r.id) + " guard references unknown variable";
    if (kind == AutomatonKind::Mta && !r.is_monotonic())
      return "MTA rule " + std::to_string(r.id) + " decrements or resets a shared variable";
  }
  return std::nullopt;
}

std::vector<LinearExpr> ThresholdAutomaton::thresholds() const {
  std::vector<LinearExpr> out;
  auto add = [&out](const LinearExpr& e) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  for (const auto& r : rules)
    for (const auto& atom : r.guard.conjuncts) add(atom.threshold);
  for (const auto& s : specs) {
    std::vector<GuardAtom> atoms;
    for (const auto& p : s.body)
      if (p.gform) p.gform->collect_atoms(atoms);
    for (const auto& a : atoms) add(a.threshold);
  }
  return out;
}

std::vector<GuardAtom> ThresholdAutomaton::distinct_rule_atoms() const {
  std::vector<GuardAtom> out;
  for (const auto& r : rules)
    for (const auto& atom : r.guard.conjuncts)
      if (std::find(out.begin(), out.end(), atom) == out.end()) out.push_back(atom);
  return out;
}

}  // namespace tamc
