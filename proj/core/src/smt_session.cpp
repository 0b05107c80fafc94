#include <cstdlib>

#include "tamc/smt/builtin.hpp"
#include "tamc/smt/solver.hpp"

namespace tamc::smt {

std::unique_ptr<SolverSession> make_process_session(const std::string& command,
                                                    Deadline deadline);

std::string resolve_solver_command(const std::string& explicit_command) {
  if (!explicit_command.empty() && explicit_command != "builtin") return explicit_command;
  if (explicit_command.empty()) {
    const char* env = std::getenv("TACHECKER_SMT");
    if (env && *env) return env;
  }
  return "";  // in-process engine
}

std::unique_ptr<SolverSession> open_session(const SessionOptions& options) {
  if (options.command.empty() || options.command == "builtin")
    return make_builtin_session(options.deadline);
  return make_process_session(options.command, options.deadline);
}

}  // namespace tamc::smt
