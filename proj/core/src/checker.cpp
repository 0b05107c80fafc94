#include "tamc/checker.hpp"

#include "tamc/acs_checker.hpp"
#include "tamc/preprocess.hpp"
#include "tamc/smt_checker.hpp"
#include "tamc/zcs_checker.hpp"

namespace tamc {

Verdict run_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  const CheckOptions& options) {
  smt::Deadline deadline = options.deadline();
  smt::SessionFactory sessions(smt::resolve_solver_command(options.solver_command), deadline);

  ThresholdAutomaton simplified;
  const ThresholdAutomaton* automaton = &ta;
  const SafetySpec* checked = &spec;
  if (options.preprocess) {
    try {
      auto session = sessions.make();
      PreprocessOptions popts;
      popts.prune_unsat_guards = options.prune_unsat_guards;
      simplified = simplify(ta, spec, popts, *session).automaton;
      automaton = &simplified;
      checked = &simplified.specs.front();
    } catch (const smt::SolverError& e) {
      return Verdict::unknown(std::string("preprocessing failed: ") + e.what());
    }
  }

  CheckerKind kind = options.checker;
  if (kind == CheckerKind::Auto)
    kind = automaton->kind == AutomatonKind::Mta ? CheckerKind::Smt : CheckerKind::Zcs;

  try {
    switch (kind) {
      case CheckerKind::Smt: {
        auto session = sessions.make();
        return smt_check(*automaton, *checked, *session);
      }
      case CheckerKind::Zcs: {
        ZcsOptions zopts;
        zopts.max_path_len = options.max_abstract_path_len;
        zopts.jobs = options.jobs;
        return zcs_check(*automaton, *checked, sessions, zopts);
      }
      case CheckerKind::Acs: {
        AcsOptions aopts;
        aopts.max_basis_size = options.max_basis_size;
        aopts.jobs = options.jobs;
        return acs_check(*automaton, *checked, sessions, aopts);
      }
      case CheckerKind::Auto: break;
    }
  } catch (const smt::SolverError& e) {
    return Verdict::unknown(std::string("solver failure: ") + e.what());
  }
  return Verdict::unknown("no checker selected");
}

}  // namespace tamc
