#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tamc/config.hpp"
#include "tamc/verdict.hpp"

namespace tamc {

/// Fixed-parameter explicit-state exploration and trace replay. This is the
/// ground-truth engine the checkers are validated against: exact for MTA
/// (shared values are capped above every threshold), bounded for ETA.
namespace oracle {

struct Outcome {
  enum class Status { Safe, Unsafe, BoundHit };
  Status status = Status::Safe;
  std::optional<Trace> trace;  // present iff Unsafe
  std::size_t configs_seen = 0;

  bool is_safe() const { return status == Status::Safe; }
  bool is_unsafe() const { return status == Status::Unsafe; }
};

/// Breadth-first exploration from all initial configurations under `params`.
/// For MTA the step bound may be omitted: shared values saturate at a cap
/// above every threshold, which keeps every guard truth exact and the state
/// space finite. For ETA a step bound is required, and only Unsafe results
/// are authoritative.
///
/// Throws std::invalid_argument when params violate RC or have the wrong
/// arity, when an ETA is explored without a bound, or when no init
/// constraint fixes the process total.
Outcome explore(const ThresholdAutomaton& ta, const SafetySpec& spec,
                std::vector<std::int64_t> params,
                std::optional<std::int64_t> step_bound = std::nullopt);

struct ReplayResult {
  enum class Status {
    Ok,
    BadParams,
    UnknownSpec,
    NoInitialConfig,
    StepNotEnabled,
    ErrorConditionUnsatisfied,
  };
  Status status = Status::Ok;
  std::optional<Configuration> final_config;  // present iff Ok
  std::int64_t failed_firing = -1;            // firing index for StepNotEnabled

  bool ok() const { return status == Status::Ok; }
};

/// Replays a trace: picks an initial configuration consistent with the init
/// constraints (and the spec's initial restriction) that admits the trace,
/// checking enabledness before every single firing, and verifies the final
/// configuration satisfies the spec's error condition.
ReplayResult replay(const ThresholdAutomaton& ta, const Trace& trace);

/// All initial configurations for `params`: every distribution of the
/// parameter-determined process total over the initial locations that
/// satisfies the init constraints (and the restriction, when given).
std::vector<Configuration> initial_configurations(const ThresholdAutomaton& ta,
                                                  std::vector<std::int64_t> params,
                                                  const CountFormula* init_restriction);

}  // namespace oracle
}  // namespace tamc
