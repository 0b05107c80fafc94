#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "tamc/automaton.hpp"
#include "tamc/smt/solver.hpp"
#include "tamc/verdict.hpp"

namespace tamc {

enum class CheckerKind { Auto, Smt, Zcs, Acs };

/// A check that cannot be run at all on the given input: the SMT checker on
/// an ETA, or the ACS checker on a specification whose error condition
/// requires target locations to be empty.
class UnsupportedCheck : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckOptions {
  CheckerKind checker = CheckerKind::Auto;
  bool preprocess = true;
  bool prune_unsat_guards = false;
  std::string solver_command;  // "" selects the in-process engine
  std::optional<double> timeout_seconds;
  std::int64_t max_abstract_path_len = 0;  // 0: 10 * |L| * max interval count
  std::int64_t max_basis_size = 200000;
  int jobs = 1;

  smt::Deadline deadline() const {
    if (!timeout_seconds) return std::nullopt;
    return std::chrono::steady_clock::now() +
           std::chrono::milliseconds((std::int64_t)(*timeout_seconds * 1000));
  }
};

/// Preprocesses (unless disabled) and dispatches to the selected checker.
/// Auto selects SMT for an MTA and ZCS for an ETA. Throws UnsupportedCheck
/// when the explicit checker cannot handle the input.
Verdict run_check(const ThresholdAutomaton& ta, const SafetySpec& spec,
                  const CheckOptions& options);

}  // namespace tamc
