#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "tamc/abstraction.hpp"
#include "tamc/smt/solver.hpp"
#include "tamc/verdict.hpp"

namespace tamc {

/// A configuration of the abstract counter system: concrete per-location
/// process counts plus abstract (interval) shared values. The well-quasi
/// order compares counts componentwise between configs with equal abstract
/// values.
struct AcsConfig {
  std::vector<std::int64_t> counts;
  std::vector<int> abstract;

  friend bool operator==(const AcsConfig&, const AcsConfig&) = default;
};

/// a <= b in the wqo: equal abstract values and counts componentwise <=.
bool acs_leq(const AcsConfig& a, const AcsConfig& b);

/// Tree index over (abstract values, then counts in declaration order) for
/// fast subsumption lookups in upward-closed set bases.
class SubsumptionIndex {
 public:
  void insert(const AcsConfig& c, int id);
  /// Is some stored config <= q?
  bool exists_leq(const AcsConfig& q) const;
  /// Removes every stored config >= q and returns their ids.
  std::vector<int> remove_geq(const AcsConfig& q);
  std::size_t size() const { return size_; }

 private:
  struct CountNode {
    std::map<std::int64_t, std::unique_ptr<CountNode>> children;
    std::vector<int> ids;  // leaves
  };
  std::map<std::vector<int>, CountNode> roots_;
  std::size_t size_ = 0;
};

/// Finite antichain basis of an upward-closed set of AcsConfigs.
class UpwardClosedSet {
 public:
  /// Inserts c if it is not subsumed; removes elements c subsumes. Returns
  /// whether c entered the basis.
  bool insert(const AcsConfig& c);
  bool contains(const AcsConfig& q) const { return index_.exists_leq(q); }
  std::vector<AcsConfig> basis() const;
  std::size_t size() const { return index_.size(); }

 private:
  SubsumptionIndex index_;
  std::vector<AcsConfig> storage_;
  std::vector<bool> alive_;
};

/// Minimal basis of configurations with a one-firing successor inside the
/// target set, per basis element, per rule, per abstract-lift branch.
std::vector<AcsConfig> pred_basis_elements(const AcsConfig& target, const IntervalTa& ita);

struct AcsOptions {
  std::int64_t max_basis_size = 200000;
  int jobs = 1;
};

/// WSTS backward-coverability checker on the abstract counter system.
/// Throws UnsupportedCheck when the spec's error condition requires target
/// locations to be empty (count = 0 or upper-bound atoms after negation).
Verdict acs_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  const smt::SessionFactory& sessions, const AcsOptions& options = {});

}  // namespace tamc
