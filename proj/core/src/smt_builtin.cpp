#include "tamc/smt/builtin.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

namespace tamc::smt {

namespace {

using BigInt = boost::multiprecision::cpp_int;

struct BigRat {
  BigInt num;
  BigInt den;  // > 0

  BigRat() : num(0), den(1) {}
  BigRat(BigInt n) : num(std::move(n)), den(1) {}
  BigRat(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) { normalize(); }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  bool is_integer() const { return den == 1; }

  BigInt floor() const {
    if (num >= 0) return num / den;
    return -((-num + den - 1) / den);
  }
  BigInt ceil() const { return -(-*this).floor(); }

  BigRat operator-() const {
    BigRat r;
    r.num = -num;
    r.den = den;
    return r;
  }
  friend BigRat operator+(const BigRat& a, const BigRat& b) {
    return BigRat(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend BigRat operator-(const BigRat& a, const BigRat& b) { return a + (-b); }
  friend BigRat operator*(const BigRat& a, const BigRat& b) {
    return BigRat(a.num * b.num, a.den * b.den);
  }
  friend BigRat operator/(const BigRat& a, const BigRat& b) {
    return BigRat(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const BigRat& a, const BigRat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const BigRat& a, const BigRat& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const BigRat& a, const BigRat& b) { return !(b < a); }
  friend bool operator>(const BigRat& a, const BigRat& b) { return b < a; }
  friend bool operator>=(const BigRat& a, const BigRat& b) { return !(a < b); }
};

// sum(coeffs) + constant <= 0, or == 0 when eq is set.
struct Atom {
  std::map<int, BigInt> coeffs;
  BigInt constant;
  bool eq = false;

  void canonicalize() {
    BigInt g = 0;
    for (auto& [v, c] : coeffs) {
      (void)v;
      g = boost::multiprecision::gcd(g, c < 0 ? BigInt(-c) : c);
    }
    if (g > 1) {
      for (auto& [v, c] : coeffs) {
        (void)v;
        c /= g;
      }
      if (eq) {
        if (constant % g != 0) {
          // No integer solution; canonical always-false form 1 == 0.
          coeffs.clear();
          constant = 1;
          return;
        }
        constant /= g;
      } else {
        // sum + c <= 0 over integers tightens to sum' + ceil(c/g) <= 0.
        BigInt q = constant / g;
        if (constant > 0 && constant % g != 0) q += 1;
        constant = q;
      }
    }
    if (eq && !coeffs.empty() && coeffs.begin()->second < 0) {
      for (auto& [v, c] : coeffs) {
        (void)v;
        c = -c;
      }
      constant = -constant;
    }
  }

  bool trivially_true() const {
    if (!coeffs.empty()) return false;
    return eq ? constant == 0 : constant <= 0;
  }
  bool trivially_false() const {
    if (!coeffs.empty()) return false;
    return eq ? constant != 0 : constant > 0;
  }

  friend bool operator<(const Atom& a, const Atom& b) {
    if (a.eq != b.eq) return a.eq < b.eq;
    if (a.constant != b.constant) return a.constant < b.constant;
    return a.coeffs < b.coeffs;
  }
  friend bool operator==(const Atom& a, const Atom& b) {
    return a.eq == b.eq && a.constant == b.constant && a.coeffs == b.coeffs;
  }

  // The complement of an inequality atom: !(t <= 0) is -t + 1 <= 0.
  Atom complement() const {
    Atom r;
    r.eq = false;
    for (const auto& [v, c] : coeffs) r.coeffs[v] = -c;
    r.constant = -constant + 1;
    return r;
  }
};

// Normal form with negation absorbed into atoms.
struct NF {
  enum class K { True, False, Atom, And, Or };
  K k = K::True;
  Atom atom;
  std::vector<NF> kids;
};

struct Budget {
  long long nodes = 0;
  long long pivots = 0;
  long long node_limit = 2000000;
  long long pivot_limit = 20000000;
  Deadline deadline;
  int deadline_stride = 0;

  bool expired() {
    if (nodes > node_limit || pivots > pivot_limit) return true;
    if (deadline && (deadline_stride++ & 63) == 0 &&
        std::chrono::steady_clock::now() > *deadline)
      return true;
    return false;
  }
};

struct BudgetExhausted {};

// ---------------------------------------------------------------------------
// General simplex (Dutertre/de Moura style) over exact rationals.
// ---------------------------------------------------------------------------
class Simplex {
 public:
  explicit Simplex(Budget& budget) : budget_(budget) {}

  int add_var() {
    int v = (int)beta_.size();
    beta_.emplace_back();
    low_.emplace_back();
    up_.emplace_back();
    basic_row_.push_back(-1);
    return v;
  }

  // Introduces a slack variable s = combo (over any existing variables).
  int add_slack(const std::map<int, BigInt>& combo) {
    std::map<int, BigRat> row;
    for (const auto& [v, c] : combo) {
      BigRat coeff{c};
      if (basic_row_[v] >= 0) {
        for (const auto& [w, rc] : rows_[basic_row_[v]].cols) add_to(row, w, coeff * rc);
      } else {
        add_to(row, v, coeff);
      }
    }
    int s = add_var();
    BigRat val;
    for (const auto& [w, rc] : row) val = val + rc * beta_[w];
    beta_[s] = val;
    rows_.push_back({s, std::move(row)});
    basic_row_[s] = (int)rows_.size() - 1;
    return s;
  }

  bool assert_upper(int v, const BigRat& b) {
    if (up_[v] && *up_[v] <= b) return true;
    if (low_[v] && b < *low_[v]) return false;
    up_[v] = b;
    if (basic_row_[v] < 0 && beta_[v] > b) update_nonbasic(v, b);
    return true;
  }

  bool assert_lower(int v, const BigRat& b) {
    if (low_[v] && *low_[v] >= b) return true;
    if (up_[v] && b > *up_[v]) return false;
    low_[v] = b;
    if (basic_row_[v] < 0 && beta_[v] < b) update_nonbasic(v, b);
    return true;
  }

  bool check() {
    for (;;) {
      if (budget_.expired()) throw BudgetExhausted{};
      int xi = -1;
      bool need_increase = false;
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        int b = rows_[r].basic;
        if (low_[b] && beta_[b] < *low_[b]) {
          if (xi < 0 || b < xi) {
            xi = b;
            need_increase = true;
          }
        } else if (up_[b] && beta_[b] > *up_[b]) {
          if (xi < 0 || b < xi) {
            xi = b;
            need_increase = false;
          }
        }
      }
      if (xi < 0) return true;
      const Row& row = rows_[basic_row_[xi]];
      int xj = -1;
      for (const auto& [w, c] : row.cols) {
        bool ok;
        if (need_increase)
          ok = (c.num > 0 && (!up_[w] || beta_[w] < *up_[w])) ||
               (c.num < 0 && (!low_[w] || beta_[w] > *low_[w]));
        else
          ok = (c.num < 0 && (!up_[w] || beta_[w] < *up_[w])) ||
               (c.num > 0 && (!low_[w] || beta_[w] > *low_[w]));
        if (ok && (xj < 0 || w < xj)) xj = w;
      }
      if (xj < 0) return false;
      pivot_and_update(xi, xj, need_increase ? *low_[xi] : *up_[xi]);
      ++budget_.pivots;
    }
  }

  const BigRat& value(int v) const { return beta_[v]; }

  struct Snapshot {
    std::vector<std::optional<BigRat>> low, up;
    std::vector<BigRat> beta;
  };
  Snapshot save() const { return {low_, up_, beta_}; }
  void restore(const Snapshot& s) {
    // Rows only ever gain pivoted forms of the same equality system, so an
    // older consistent assignment remains consistent.
    low_ = s.low;
    up_ = s.up;
    beta_ = s.beta;
  }

 private:
  struct Row {
    int basic;
    std::map<int, BigRat> cols;  // nonbasic var -> coefficient
  };

  static void add_to(std::map<int, BigRat>& row, int v, const BigRat& c) {
    auto it = row.find(v);
    if (it == row.end()) {
      if (!(c.num == 0)) row.emplace(v, c);
      return;
    }
    it->second = it->second + c;
    if (it->second.num == 0) row.erase(it);
  }

  void update_nonbasic(int v, const BigRat& val) {
    BigRat delta = val - beta_[v];
    beta_[v] = val;
    for (auto& row : rows_) {
      auto it = row.cols.find(v);
      if (it != row.cols.end()) beta_[row.basic] = beta_[row.basic] + it->second * delta;
    }
  }

  void pivot_and_update(int xi, int xj, const BigRat& v) {
    Row& row = rows_[basic_row_[xi]];
    BigRat a = row.cols.at(xj);
    BigRat theta = (v - beta_[xi]) / a;
    beta_[xi] = v;
    beta_[xj] = beta_[xj] + theta;
    for (auto& other : rows_) {
      if (other.basic == xi) continue;
      auto it = other.cols.find(xj);
      if (it != other.cols.end()) beta_[other.basic] = beta_[other.basic] + it->second * theta;
    }
    // Solve xi's row for xj.
    std::map<int, BigRat> newcols;
    BigRat inv_a = BigRat(BigInt(1)) / a;
    newcols[xi] = inv_a;
    for (const auto& [w, c] : row.cols) {
      if (w == xj) continue;
      newcols[w] = -c * inv_a;
    }
    int ri = basic_row_[xi];
    rows_[ri].basic = xj;
    rows_[ri].cols = newcols;
    basic_row_[xj] = ri;
    basic_row_[xi] = -1;
    // Substitute xj in all other rows.
    for (auto& other : rows_) {
      if (other.basic == xj) continue;
      auto it = other.cols.find(xj);
      if (it == other.cols.end()) continue;
      BigRat f = it->second;
      other.cols.erase(it);
      for (const auto& [w, c] : newcols) add_to(other.cols, w, f * c);
    }
  }

  Budget& budget_;
  std::vector<BigRat> beta_;
  std::vector<std::optional<BigRat>> low_, up_;
  std::vector<int> basic_row_;  // -1 if nonbasic
  std::vector<Row> rows_;
};

// ---------------------------------------------------------------------------
// Search: case split over disjunctions, LP pruning, branch-and-bound leaves.
// ---------------------------------------------------------------------------

class Search {
 public:
  Search(int nvars, Budget& budget) : nvars_(nvars), budget_(budget), simplex_(budget) {
    for (int i = 0; i < nvars_; ++i) simplex_.add_var();
  }

  // Result kinds: 0 = unsat, 1 = sat, 2 = unknown.
  int solve(const std::vector<const NF*>& roots) {
    for (const NF* r : roots) collect_atoms(*r);
    std::set<Atom> facts;
    std::vector<std::vector<const NF*>> ors;
    std::vector<const NF*> todo = roots;
    return expand_and_branch(std::move(facts), std::move(ors), std::move(todo));
  }

  const std::map<int, BigInt>& model() const { return model_; }

 private:
  // Every distinct atom owns one slack row; asserting the atom tightens the
  // slack's bounds, so the tableau is built once and reused incrementally
  // across the whole search tree.
  void collect_atoms(const NF& n) {
    if (n.k == NF::K::Atom) {
      if (!n.atom.coeffs.empty() && !slack_.count(n.atom))
        slack_.emplace(n.atom, simplex_.add_slack(n.atom.coeffs));
      return;
    }
    for (const auto& kid : n.kids) collect_atoms(kid);
  }

  // Tightens the slack bounds for an atom; returns false on bound conflict.
  bool assert_atom(const Atom& a) {
    auto it = slack_.find(a);
    if (it == slack_.end()) {
      // Atom introduced by complementation; add its row on demand.
      if (a.coeffs.empty()) return !a.trivially_false();
      it = slack_.emplace(a, simplex_.add_slack(a.coeffs)).first;
    }
    BigRat bound{-a.constant};
    if (!simplex_.assert_upper(it->second, bound)) return false;
    if (a.eq && !simplex_.assert_lower(it->second, bound)) return false;
    return true;
  }

  // Adds an atom fact; returns false on an immediate conflict.
  bool add_fact(std::set<Atom>& facts, const Atom& a) {
    if (a.trivially_true()) return true;
    if (a.trivially_false()) return false;
    if (facts.count(a)) return true;
    if (!a.eq && facts.count(a.complement())) return false;
    if (!assert_atom(a)) return false;
    facts.insert(a);
    return true;
  }

  int expand_and_branch(std::set<Atom> facts, std::vector<std::vector<const NF*>> ors,
                        std::vector<const NF*> todo) {
    ++budget_.nodes;
    if (budget_.expired()) throw BudgetExhausted{};

    // Expansion and boolean constraint propagation to a fixed point:
    // conjunctions flatten into facts, satisfied disjunctions drop, dead
    // arms vanish, single-arm disjunctions promote to conjuncts.
    for (;;) {
      while (!todo.empty()) {
        const NF* n = todo.back();
        todo.pop_back();
        switch (n->k) {
          case NF::K::True: break;
          case NF::K::False: return 0;
          case NF::K::Atom:
            if (!add_fact(facts, n->atom)) return 0;
            break;
          case NF::K::And:
            for (const auto& kid : n->kids) todo.push_back(&kid);
            break;
          case NF::K::Or: {
            std::vector<const NF*> arms;
            arms.reserve(n->kids.size());
            for (const auto& kid : n->kids) arms.push_back(&kid);
            ors.push_back(std::move(arms));
            break;
          }
        }
      }

      bool changed = false;
      for (std::size_t i = 0; i < ors.size();) {
        auto& arms = ors[i];
        bool satisfied = false;
        for (std::size_t j = 0; j < arms.size();) {
          const NF* arm = arms[j];
          if (arm->k == NF::K::True) {
            satisfied = true;
            break;
          }
          if (arm->k == NF::K::False) {
            arms.erase(arms.begin() + j);
            continue;
          }
          if (arm->k == NF::K::Atom) {
            if (arm->atom.trivially_true() || facts.count(arm->atom)) {
              satisfied = true;
              break;
            }
            if (arm->atom.trivially_false() ||
                (!arm->atom.eq && facts.count(arm->atom.complement()))) {
              arms.erase(arms.begin() + j);
              continue;
            }
          }
          ++j;
        }
        if (satisfied) {
          ors.erase(ors.begin() + i);
          changed = true;
          continue;
        }
        if (arms.empty()) return 0;
        if (arms.size() == 1) {
          todo.push_back(arms[0]);
          ors.erase(ors.begin() + i);
          changed = true;
          continue;
        }
        ++i;
      }
      if (!changed && todo.empty()) break;
    }

    if (!simplex_.check()) return 0;
    if (ors.empty()) return branch_integers();

    // Split on a smallest disjunction.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < ors.size(); ++i)
      if (ors[i].size() < ors[pick].size()) pick = i;
    std::vector<std::vector<const NF*>> rest;
    rest.reserve(ors.size() - 1);
    for (std::size_t i = 0; i < ors.size(); ++i)
      if (i != pick) rest.push_back(ors[i]);
    bool any_unknown = false;
    for (const NF* arm : ors[pick]) {
      auto snap = simplex_.save();
      int r = expand_and_branch(facts, rest, {arm});
      simplex_.restore(snap);
      if (r == 1) return 1;
      if (r == 2) any_unknown = true;
    }
    return any_unknown ? 2 : 0;
  }

  int branch_integers() {
    ++budget_.nodes;
    if (budget_.expired()) throw BudgetExhausted{};
    if (!simplex_.check()) return 0;
    int frac = -1;
    for (int v = 0; v < nvars_; ++v)
      if (!simplex_.value(v).is_integer()) {
        frac = v;
        break;
      }
    if (frac < 0) {
      model_.clear();
      for (int v = 0; v < nvars_; ++v) model_[v] = simplex_.value(v).num;
      return 1;
    }
    BigInt fl = simplex_.value(frac).floor();
    auto snap = simplex_.save();
    bool any_unknown = false;
    if (simplex_.assert_upper(frac, BigRat(fl))) {
      int r = branch_integers();
      if (r == 1) return 1;
      if (r == 2) any_unknown = true;
    }
    simplex_.restore(snap);
    if (simplex_.assert_lower(frac, BigRat(fl + 1))) {
      int r = branch_integers();
      if (r == 1) return 1;
      if (r == 2) any_unknown = true;
    }
    simplex_.restore(snap);
    return any_unknown ? 2 : 0;
  }

  int nvars_;
  Budget& budget_;
  Simplex simplex_;
  std::map<Atom, int> slack_;
  std::map<int, BigInt> model_;
};

}  // namespace

// ---------------------------------------------------------------------------
// BuiltinSolver
// ---------------------------------------------------------------------------

struct BuiltinSolver::Impl {
  struct Frame {
    std::vector<TermRef> asserts;
    std::vector<std::string> decls;
  };
  std::vector<std::string> names;
  std::map<std::string, int> ids;
  std::vector<Frame> frames{1};

  int var_id(const std::string& name) const {
    auto it = ids.find(name);
    if (it == ids.end()) throw std::logic_error("use of undeclared constant: " + name);
    return it->second;
  }

  // Linear combination extraction.
  void combo(const TermRef& t, const BigInt& mulf, std::map<int, BigInt>& coeffs,
             BigInt& constant) const {
    switch (t->kind) {
      case NodeKind::Var: {
        int v = var_id(t->name);
        coeffs[v] += mulf;
        if (coeffs[v] == 0) coeffs.erase(v);
        return;
      }
      case NodeKind::Lit: constant += mulf * t->value; return;
      case NodeKind::Add:
        for (const auto& k : t->kids) combo(k, mulf, coeffs, constant);
        return;
      case NodeKind::Mul: {
        BigInt f = mulf * t->kids[0]->value;
        combo(t->kids[1], f, coeffs, constant);
        return;
      }
      default: throw std::logic_error("nonlinear or boolean term in arithmetic position");
    }
  }

  Atom cmp_atom(const TermRef& a, const TermRef& b, int adjust, bool eq = false) const {
    // a - b + adjust <= 0 (or == 0)
    Atom at;
    at.eq = eq;
    combo(a, 1, at.coeffs, at.constant);
    combo(b, -1, at.coeffs, at.constant);
    at.constant += adjust;
    at.canonicalize();
    return at;
  }

  NF nnf(const TermRef& t, bool neg) const {
    NF out;
    switch (t->kind) {
      case NodeKind::True: out.k = neg ? NF::K::False : NF::K::True; return out;
      case NodeKind::False: out.k = neg ? NF::K::True : NF::K::False; return out;
      case NodeKind::Not: return nnf(t->kids[0], !neg);
      case NodeKind::Implies: {
        out.k = neg ? NF::K::And : NF::K::Or;
        out.kids.push_back(nnf(t->kids[0], !neg));
        out.kids.push_back(nnf(t->kids[1], neg));
        return out;
      }
      case NodeKind::And:
      case NodeKind::Or: {
        bool is_and = (t->kind == NodeKind::And) != neg;
        out.k = is_and ? NF::K::And : NF::K::Or;
        for (const auto& k : t->kids) out.kids.push_back(nnf(k, neg));
        return out;
      }
      case NodeKind::Le:
      case NodeKind::Lt:
      case NodeKind::Ge:
      case NodeKind::Gt: {
        const TermRef& a = t->kids[0];
        const TermRef& b = t->kids[1];
        bool swap = t->kind == NodeKind::Ge || t->kind == NodeKind::Gt;
        bool strict = t->kind == NodeKind::Lt || t->kind == NodeKind::Gt;
        // canonical: lhs <= rhs (+ strict adjust)
        TermRef lhs = swap ? b : a, rhs = swap ? a : b;
        if (neg) {
          std::swap(lhs, rhs);
          strict = !strict;
        }
        out.k = NF::K::Atom;
        out.atom = cmp_atom(lhs, rhs, strict ? 1 : 0);
        return out;
      }
      case NodeKind::Eq: {
        if (!neg) {
          out.k = NF::K::Atom;
          out.atom = cmp_atom(t->kids[0], t->kids[1], 0, /*eq=*/true);
          return out;
        }
        out.k = NF::K::Or;
        NF lt_side, gt_side;
        lt_side.k = NF::K::Atom;
        lt_side.atom = cmp_atom(t->kids[0], t->kids[1], 1);  // a < b
        gt_side.k = NF::K::Atom;
        gt_side.atom = cmp_atom(t->kids[1], t->kids[0], 1);  // b < a
        out.kids = {std::move(lt_side), std::move(gt_side)};
        return out;
      }
      default: throw std::logic_error("arithmetic term in boolean position");
    }
  }
};

BuiltinSolver::BuiltinSolver() : impl_(std::make_unique<Impl>()) {}
BuiltinSolver::~BuiltinSolver() = default;

void BuiltinSolver::declare(const std::string& name) {
  if (impl_->ids.count(name)) throw std::logic_error("constant already declared: " + name);
  impl_->ids[name] = (int)impl_->names.size();
  impl_->names.push_back(name);
  impl_->frames.back().decls.push_back(name);
}

bool BuiltinSolver::is_declared(const std::string& name) const {
  return impl_->ids.count(name) > 0;
}

const std::vector<std::string>& BuiltinSolver::declared() const { return impl_->names; }

void BuiltinSolver::assert_term(const TermRef& t) {
  impl_->frames.back().asserts.push_back(t);
}

void BuiltinSolver::push() { impl_->frames.emplace_back(); }

void BuiltinSolver::pop() {
  if (impl_->frames.size() <= 1) throw std::logic_error("pop with no matching push");
  // Declarations are scoped to their frame (SMT-LIB push/pop semantics);
  // a frame's declarations are always the most recent names.
  for (auto it = impl_->frames.back().decls.rbegin(); it != impl_->frames.back().decls.rend();
       ++it) {
    impl_->ids.erase(*it);
    impl_->names.pop_back();
  }
  impl_->frames.pop_back();
}

int BuiltinSolver::depth() const { return (int)impl_->frames.size() - 1; }

SmtResult BuiltinSolver::check(Deadline deadline) {
  Budget budget;
  budget.deadline = deadline;

  NF root;
  root.k = NF::K::And;
  try {
    for (const auto& frame : impl_->frames)
      for (const auto& t : frame.asserts) root.kids.push_back(impl_->nnf(t, false));
  } catch (const std::logic_error& e) {
    throw SolverError(SolverError::Kind::ProtocolError, e.what());
  }

  Search search((int)impl_->names.size(), budget);
  int r;
  try {
    r = search.solve({&root});
  } catch (const BudgetExhausted&) {
    return {SmtResult::Kind::Unknown, {}, "search budget exhausted"};
  }
  if (r == 0) return {SmtResult::Kind::Unsat, {}, ""};
  if (r == 2) return {SmtResult::Kind::Unknown, {}, "incomplete search"};

  SmtResult res;
  res.kind = SmtResult::Kind::Sat;
  for (std::size_t v = 0; v < impl_->names.size(); ++v) {
    BigInt val = 0;
    auto it = search.model().find((int)v);
    if (it != search.model().end()) val = it->second;
    if (val > INT64_MAX || val < INT64_MIN)
      return {SmtResult::Kind::Unknown, {}, "model value out of range"};
    res.model[impl_->names[v]] = (std::int64_t)val;
  }
  return res;
}

namespace {

class BuiltinSession : public SolverSession {
 public:
  explicit BuiltinSession(Deadline d) : deadline_(d) {}

  void declare_int(const std::string& name) override { solver_.declare(name); }
  void assert_term(const TermRef& t) override { solver_.assert_term(t); }
  void push() override { solver_.push(); }
  void pop() override { solver_.pop(); }
  SmtResult check() override { return solver_.check(deadline_); }
  int depth() const override { return solver_.depth(); }
  void set_deadline(Deadline d) override { deadline_ = d; }

 private:
  BuiltinSolver solver_;
  Deadline deadline_;
};

}  // namespace

std::unique_ptr<SolverSession> make_builtin_session(Deadline deadline) {
  return std::make_unique<BuiltinSession>(deadline);
}

}  // namespace tamc::smt
