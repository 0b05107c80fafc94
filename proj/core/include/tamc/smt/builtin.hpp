#pragma once

#include <memory>
#include <vector>

#include "tamc/smt/solver.hpp"

namespace tamc::smt {

/// In-process QF_LIA decision procedure: exact rational simplex with
/// branch-and-bound for integrality and case splitting over disjunctions.
/// Serves as the default backend when no external solver is configured and
/// as the engine behind the tamc-smt binary.
class BuiltinSolver {
 public:
  BuiltinSolver();
  ~BuiltinSolver();

  void declare(const std::string& name);
  bool is_declared(const std::string& name) const;
  const std::vector<std::string>& declared() const;

  void assert_term(const TermRef& t);
  void push();
  /// Throws std::logic_error when no frame is open.
  void pop();
  int depth() const;

  SmtResult check(Deadline deadline = std::nullopt);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<SolverSession> make_builtin_session(Deadline deadline);

}  // namespace tamc::smt
