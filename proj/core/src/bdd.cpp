#include "tamc/sym/bdd.hpp"

#include <stdexcept>

namespace tamc::sym {

namespace {
enum Op { OpAnd = 1, OpOr = 2, OpNot = 3, OpExists = 4, OpRename = 5, OpCount = 6 };
}

BddManager::BddManager(int num_vars) : num_vars_(num_vars) {
  nodes_.push_back({num_vars_, 0, 0});  // false
  nodes_.push_back({num_vars_, 1, 1});  // true
}

BddRef BddManager::mk(int var, BddRef lo, BddRef hi) {
  if (lo == hi) return lo;
  NodeKey key{var, lo, hi};
  auto it = unique_.find(key);
  if (it != unique_.end()) return it->second;
  nodes_.push_back({var, lo, hi});
  BddRef r = (BddRef)(nodes_.size() - 1);
  unique_.emplace(key, r);
  return r;
}

BddRef BddManager::var(int v) { return mk(v, 0, 1); }
BddRef BddManager::nvar(int v) { return mk(v, 1, 0); }

BddRef BddManager::apply(int op, BddRef a, BddRef b) {
  if (op == OpAnd) {
    if (a == 0 || b == 0) return 0;
    if (a == 1) return b;
    if (b == 1) return a;
    if (a == b) return a;
  } else {
    if (a == 1 || b == 1) return 1;
    if (a == 0) return b;
    if (b == 0) return a;
    if (a == b) return a;
  }
  if (b < a) std::swap(a, b);
  OpKey key{op, a, b};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  int va = var_of(a), vb = var_of(b);
  int v = std::min(va, vb);
  BddRef alo = va == v ? nodes_[a].lo : a;
  BddRef ahi = va == v ? nodes_[a].hi : a;
  BddRef blo = vb == v ? nodes_[b].lo : b;
  BddRef bhi = vb == v ? nodes_[b].hi : b;
  BddRef r = mk(v, apply(op, alo, blo), apply(op, ahi, bhi));
  cache_.emplace(key, r);
  return r;
}

BddRef BddManager::band(BddRef a, BddRef b) { return apply(OpAnd, a, b); }
BddRef BddManager::bor(BddRef a, BddRef b) { return apply(OpOr, a, b); }

BddRef BddManager::bnot(BddRef a) {
  if (a == 0) return 1;
  if (a == 1) return 0;
  OpKey key{OpNot, a, 0};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  BddRef r = mk(nodes_[a].var, bnot(nodes_[a].lo), bnot(nodes_[a].hi));
  cache_.emplace(key, r);
  return r;
}

BddRef BddManager::cube(const std::vector<int>& assignment) {
  BddRef r = 1;
  for (int v = (int)assignment.size() - 1; v >= 0; --v) {
    if (assignment[v] == 1)
      r = mk(v, 0, r);
    else if (assignment[v] == 0)
      r = mk(v, r, 0);
  }
  return r;
}

BddRef BddManager::exists(BddRef f, const std::vector<bool>& mask) {
  if (f <= 1) return f;
  // The mask is call-scoped; use a local cache to keep results exact.
  std::unordered_map<BddRef, BddRef> memo;
  std::function<BddRef(BddRef)> rec = [&](BddRef g) -> BddRef {
    if (g <= 1) return g;
    auto it = memo.find(g);
    if (it != memo.end()) return it->second;
    const Node n = nodes_[g];
    BddRef lo = rec(n.lo);
    BddRef hi = rec(n.hi);
    BddRef r = mask[n.var] ? bor(lo, hi) : mk(n.var, lo, hi);
    memo.emplace(g, r);
    return r;
  };
  return rec(f);
}

BddRef BddManager::rename(BddRef f, const std::vector<int>& perm) {
  if (f <= 1) return f;
  std::unordered_map<BddRef, BddRef> memo;
  std::function<BddRef(BddRef)> rec = [&](BddRef g) -> BddRef {
    if (g <= 1) return g;
    auto it = memo.find(g);
    if (it != memo.end()) return it->second;
    const Node n = nodes_[g];
    BddRef lo = rec(n.lo);
    BddRef hi = rec(n.hi);
    int nv = perm[n.var];
    if (var_of(lo) <= nv || var_of(hi) <= nv)
      throw std::logic_error("rename permutation does not preserve the variable order");
    BddRef r = mk(nv, lo, hi);
    memo.emplace(g, r);
    return r;
  };
  return rec(f);
}

std::uint64_t BddManager::count(BddRef f) {
  std::unordered_map<BddRef, std::uint64_t> memo;
  std::function<std::uint64_t(BddRef, int)> rec = [&](BddRef g, int from_var) -> std::uint64_t {
    if (g == 0) return 0;
    int v = var_of(g);
    std::uint64_t below;
    if (g == 1) {
      below = 1;
      v = num_vars_;
    } else {
      auto it = memo.find(g);
      if (it != memo.end()) {
        below = it->second;
      } else {
        below = rec(nodes_[g].lo, nodes_[g].var + 1) + rec(nodes_[g].hi, nodes_[g].var + 1);
        memo.emplace(g, below);
      }
    }
    return below << (v - from_var);
  };
  return rec(f, 0);
}

void BddManager::enumerate(BddRef f, const std::vector<int>& vars,
                           const std::function<bool(const std::vector<int>&)>& cb) {
  std::vector<int> values(vars.size(), 0);
  std::function<bool(BddRef, std::size_t)> rec = [&](BddRef g, std::size_t i) -> bool {
    if (g == 0) return true;
    if (i == vars.size()) {
      if (var_of(g) < num_vars_)
        throw std::logic_error("enumerate: support extends beyond the variable list");
      return cb(values);
    }
    int v = vars[i];
    int gv = var_of(g);
    if (gv < v) throw std::logic_error("enumerate: support extends beyond the variable list");
    if (gv > v) {
      values[i] = 0;
      if (!rec(g, i + 1)) return false;
      values[i] = 1;
      return rec(g, i + 1);
    }
    values[i] = 0;
    if (!rec(nodes_[g].lo, i + 1)) return false;
    values[i] = 1;
    return rec(nodes_[g].hi, i + 1);
  };
  rec(f, 0);
}

}  // namespace tamc::sym
