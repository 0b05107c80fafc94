#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tamc::smt {

/// Quantifier-free linear integer terms and formulas. Multiplication only
/// pairs a literal with a term, so everything emitted stays within QF_LIA.
struct Node;
using TermRef = std::shared_ptr<const Node>;

enum class NodeKind {
  Var,
  Lit,
  Add,
  Mul,  // kids[0] is a Lit
  Le,
  Lt,
  Ge,
  Gt,
  Eq,
  And,
  Or,
  Not,
  Implies,
  True,
  False,
};

struct Node {
  NodeKind kind;
  std::string name;           // Var
  std::int64_t value = 0;     // Lit
  std::vector<TermRef> kids;
};

TermRef var(std::string name);
TermRef lit(std::int64_t v);
TermRef add(std::vector<TermRef> ts);
TermRef mul(std::int64_t c, TermRef t);
TermRef le(TermRef a, TermRef b);
TermRef lt(TermRef a, TermRef b);
TermRef ge(TermRef a, TermRef b);
TermRef gt(TermRef a, TermRef b);
TermRef eq(TermRef a, TermRef b);
TermRef land(std::vector<TermRef> ts);
TermRef lor(std::vector<TermRef> ts);
TermRef lnot(TermRef t);
TermRef implies(TermRef a, TermRef b);
TermRef tru();
TermRef fls();

/// SMT-LIB2 rendering of a term or formula.
std::string to_smtlib(const TermRef& t);

}  // namespace tamc::smt
