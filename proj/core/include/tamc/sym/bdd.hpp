#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

namespace tamc::sym {

/// Reduced ordered BDDs over a fixed variable order. Hash-consed nodes make
/// the representation canonical: two sets are equal iff their refs are equal.
/// Ref 0 is the false terminal, ref 1 the true terminal.
using BddRef = std::int32_t;

class BddManager {
 public:
  explicit BddManager(int num_vars);

  int num_vars() const { return num_vars_; }

  BddRef bfalse() const { return 0; }
  BddRef btrue() const { return 1; }
  BddRef var(int v);
  BddRef nvar(int v);

  BddRef band(BddRef a, BddRef b);
  BddRef bor(BddRef a, BddRef b);
  BddRef bnot(BddRef a);
  BddRef bdiff(BddRef a, BddRef b) { return band(a, bnot(b)); }

  /// Conjunction of fixed literals; assignment[v] in {0, 1, -1 (don't care)}.
  BddRef cube(const std::vector<int>& assignment);

  /// Existential quantification over the masked variables.
  BddRef exists(BddRef f, const std::vector<bool>& mask);

  /// Variable renaming; perm must preserve the variable order on the support
  /// of f (the interleaved primed/unprimed layout satisfies this).
  BddRef rename(BddRef f, const std::vector<int>& perm);

  bool is_false(BddRef f) const { return f == 0; }

  /// Number of satisfying assignments over all variables.
  std::uint64_t count(BddRef f);

  /// Enumerates assignments over the given ascending variable list,
  /// lexicographically (first variable outermost, branch 0 before 1). The
  /// support of f must be contained in `vars`. The callback receives values
  /// aligned with `vars`; returning false stops the enumeration.
  void enumerate(BddRef f, const std::vector<int>& vars,
                 const std::function<bool(const std::vector<int>&)>& cb);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    int var;
    BddRef lo, hi;
  };
  struct NodeKey {
    int var;
    BddRef lo, hi;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      std::size_t h = (std::size_t)k.var;
      h = h * 0x9e3779b97f4a7c15ull + (std::size_t)k.lo;
      h = h * 0x9e3779b97f4a7c15ull + (std::size_t)k.hi;
      return h;
    }
  };
  struct OpKey {
    int op;
    BddRef a, b;
    bool operator==(const OpKey&) const = default;
  };
  struct OpKeyHash {
    std::size_t operator()(const OpKey& k) const {
      std::size_t h = (std::size_t)k.op;
      h = h * 0x9e3779b97f4a7c15ull + (std::size_t)k.a;
      h = h * 0x9e3779b97f4a7c15ull + (std::size_t)k.b;
      return h;
    }
  };

  BddRef mk(int var, BddRef lo, BddRef hi);
  BddRef apply(int op, BddRef a, BddRef b);
  int var_of(BddRef r) const { return r <= 1 ? num_vars_ : nodes_[r].var; }

  int num_vars_;
  std::vector<Node> nodes_;  // [0] and [1] are terminal placeholders
  std::unordered_map<NodeKey, BddRef, NodeKeyHash> unique_;
  std::unordered_map<OpKey, BddRef, OpKeyHash> cache_;
};

}  // namespace tamc::sym
