#include "tamc/smt/term.hpp"

#include <sstream>

namespace tamc::smt {

namespace {
TermRef make(NodeKind k, std::vector<TermRef> kids = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids = std::move(kids);
  return n;
}
}  // namespace

TermRef var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->name = std::move(name);
  return n;
}

TermRef lit(std::int64_t v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Lit;
  n->value = v;
  return n;
}

TermRef add(std::vector<TermRef> ts) {
  if (ts.empty()) return lit(0);
  if (ts.size() == 1) return ts[0];
  return make(NodeKind::Add, std::move(ts));
}

TermRef mul(std::int64_t c, TermRef t) {
  if (c == 1) return t;
  return make(NodeKind::Mul, {lit(c), std::move(t)});
}

TermRef le(TermRef a, TermRef b) { return make(NodeKind::Le, {std::move(a), std::move(b)}); }
TermRef lt(TermRef a, TermRef b) { return make(NodeKind::Lt, {std::move(a), std::move(b)}); }
TermRef ge(TermRef a, TermRef b) { return make(NodeKind::Ge, {std::move(a), std::move(b)}); }
TermRef gt(TermRef a, TermRef b) { return make(NodeKind::Gt, {std::move(a), std::move(b)}); }
TermRef eq(TermRef a, TermRef b) { return make(NodeKind::Eq, {std::move(a), std::move(b)}); }

TermRef land(std::vector<TermRef> ts) {
  std::vector<TermRef> kept;
  for (auto& t : ts) {
    if (t->kind == NodeKind::True) continue;
    if (t->kind == NodeKind::False) return fls();
    kept.push_back(std::move(t));
  }
  if (kept.empty()) return tru();
  if (kept.size() == 1) return kept[0];
  return make(NodeKind::And, std::move(kept));
}

TermRef lor(std::vector<TermRef> ts) {
  std::vector<TermRef> kept;
  for (auto& t : ts) {
    if (t->kind == NodeKind::False) continue;
    if (t->kind == NodeKind::True) return tru();
    kept.push_back(std::move(t));
  }
  if (kept.empty()) return fls();
  if (kept.size() == 1) return kept[0];
  return make(NodeKind::Or, std::move(kept));
}

TermRef lnot(TermRef t) {
  if (t->kind == NodeKind::True) return fls();
  if (t->kind == NodeKind::False) return tru();
  return make(NodeKind::Not, {std::move(t)});
}

TermRef implies(TermRef a, TermRef b) {
  if (a->kind == NodeKind::True) return b;
  if (a->kind == NodeKind::False) return tru();
  if (b->kind == NodeKind::True) return tru();
  return make(NodeKind::Implies, {std::move(a), std::move(b)});
}

TermRef tru() { return make(NodeKind::True); }
TermRef fls() { return make(NodeKind::False); }

namespace {
void print(const TermRef& t, std::ostringstream& out) {
  switch (t->kind) {
    case NodeKind::Var: out << t->name; return;
    case NodeKind::Lit:
      if (t->value < 0)
        out << "(- " << -t->value << ")";
      else
        out << t->value;
      return;
    case NodeKind::True: out << "true"; return;
    case NodeKind::False: out << "false"; return;
    default: break;
  }
  const char* op = "";
  switch (t->kind) {
    case NodeKind::Add: op = "+"; break;
    case NodeKind::Mul: op = "*"; break;
    case NodeKind::Le: op = "<="; break;
    case NodeKind::Lt: op = "<"; break;
    case NodeKind::Ge: op = ">="; break;
    case NodeKind::Gt: op = ">"; break;
    case NodeKind::Eq: op = "="; break;
    case NodeKind::And: op = "and"; break;
    case NodeKind::Or: op = "or"; break;
    case NodeKind::Not: op = "not"; break;
    case NodeKind::Implies: op = "=>"; break;
    default: break;
  }
  out << "(" << op;
  for (const auto& k : t->kids) {
    out << " ";
    print(k, out);
  }
  out << ")";
}
}  // namespace

std::string to_smtlib(const TermRef& t) {
  std::ostringstream out;
  print(t, out);
  return out.str();
}

}  // namespace tamc::smt
