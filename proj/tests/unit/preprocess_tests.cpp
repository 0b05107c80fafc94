#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common/test_util.hpp"
#include "tamc/preprocess.hpp"
#include "tamc/smt/builtin.hpp"

using namespace tamc;

namespace {

PreprocessResult run(const ThresholdAutomaton& ta, const SafetySpec& spec,
                     bool prune = false) {
  auto session = smt::make_builtin_session(std::nullopt);
  PreprocessOptions options;
  options.prune_unsat_guards = prune;
  return simplify(ta, spec, options, *session);
}

}  // namespace

TEST_CASE("self-loops without effect on the variables are removed") {
  std::string source = R"(ta X {
    shared x;
    parameters n;
    assumptions (1) { n > 0; }
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (3) {
        0: A -> A when (true) do {};
        1: A -> B when (true) do { x' := x + 1; };
        2: B -> B when (x >= n) do { x' := x + 1; };
    }
    specifications (1) { s: [](B == 0) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source);
  PreprocessResult r = run(ta, ta.specs[0]);
  CHECK(r.report.self_loops_removed == 1);
  CHECK(r.automaton.rules.size() == 2);
  // the self-loop with an update stays
  CHECK(r.automaton.find_rule(2) != nullptr);
  CHECK(r.automaton.find_rule(0) == nullptr);
}

TEST_CASE("conjuncts provable from RC alone become true; others are kept") {
  std::string source = R"(ta X {
    shared x;
    parameters n, t, f;
    assumptions (2) { n > 3 * t; t >= f; }
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (2) {
        0: A -> B when (x >= t - f - n) do { x' := x + 1; };
        1: A -> B when (x >= n + 1) do {};
    }
    specifications (1) { s: [](B == 0) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source);
  PreprocessResult r = run(ta, ta.specs[0]);
  // t - f - n <= 0 under RC, so rule 0's guard is always satisfied.
  CHECK(r.report.conjuncts_simplified == 1);
  CHECK(r.automaton.find_rule(0)->guard.is_true());
  // x >= n + 1 is reachable for large x: kept (conservative default).
  CHECK_FALSE(r.automaton.find_rule(1)->guard.is_true());
}

TEST_CASE("optional pruning removes rules with RC-unsatisfiable guards") {
  std::string source = R"(ta X {
    shared x;
    parameters n;
    assumptions (1) { n > 2; }
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (2) {
        0: A -> B when (x < n && x > 2 * n) do {};
        1: A -> B when (x >= n) do { x' := x + 1; };
    }
    specifications (1) { s: [](B == 0) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source);
  PreprocessResult off = run(ta, ta.specs[0], false);
  CHECK(off.report.unsat_guard_rules_removed == 0);
  CHECK(off.automaton.rules.size() == 2);
  PreprocessResult on = run(ta, ta.specs[0], true);
  CHECK(on.report.unsat_guard_rules_removed == 1);
  CHECK(on.automaton.find_rule(0) == nullptr);
}

TEST_CASE("the initial restriction drives the reachability start set") {
  // The analysis is pure graph reachability: in the reliable-broadcast
  // fixture every location has a rule path from V0, so nothing is pruned
  // even under V1 == 0.
  ThresholdAutomaton ta = test::load_fixture("broadcast.eta");
  PreprocessResult r = run(ta, ta.specs[0]);
  CHECK(r.report.locations_removed == 0);
  CHECK(r.automaton.locations.size() == 5);

  // With a location reachable only from the restricted V1, pruning fires.
  std::string source = R"(ta P {
    shared x;
    parameters n;
    assumptions (1) { n > 0; }
    locations (4) { V0: [0]; V1: [1]; X: [2]; AC: [3]; }
    inits (3) { X == 0; AC == 0; V1 + V0 == n; }
    rules (3) {
        0: V1 -> X when (true) do { x' := x + 1; };
        1: V0 -> AC when (x >= n) do {};
        2: X -> AC when (true) do {};
    }
    specifications (1) { s: V1 == 0 -> [](AC == 0) }
})";
  ThresholdAutomaton pta = test::parse_or_throw(source);
  PreprocessResult pr = run(pta, pta.specs[0]);
  // start set {V0}: V1 and X are unreachable; AC stays (reachable via r1)
  CHECK(pr.report.locations_removed == 2);
  CHECK_FALSE(pr.automaton.location_index("V1").has_value());
  CHECK_FALSE(pr.automaton.location_index("X").has_value());
  CHECK(pr.automaton.location_index("AC").has_value());
  // rules touching removed locations went with them
  CHECK(pr.automaton.rules.size() == 1);
  CHECK(pr.automaton.find_rule(1) != nullptr);
  // the spec's location indices were remapped consistently
  ErrorCondition err = error_condition(pr.automaton.specs[0]);
  std::vector<std::int64_t> counts(pr.automaton.locations.size(), 0);
  counts[*pr.automaton.location_index("AC")] = 1;
  std::vector<std::int64_t> shared(pr.automaton.shared.size(), 0);
  std::vector<std::int64_t> params{3};
  CHECK(err.eval(counts, shared, params));
  // init constraints dropped the removed location terms: V0 == n remains
  bool total_ok = false;
  for (const auto& c : pr.automaton.init_constraints)
    if (c.rel == LinearConstraint::Rel::Eq && c.terms.size() == 2) total_ok = true;
  CHECK(total_ok);
}

TEST_CASE("a spec-named unreachable location is kept and noted") {
  std::string source = R"(ta K {
    shared x;
    parameters n;
    assumptions (1) { n > 0; }
    locations (3) { V0: [0]; V1: [1]; AC: [2]; }
    inits (2) { AC == 0; V1 + V0 == n; }
    rules (2) {
        0: V1 -> AC when (true) do {};
        1: V0 -> V0 when (true) do { x' := x + 1; };
    }
    specifications (1) { s: V1 == 0 -> [](AC == 0) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source);
  PreprocessResult r = run(ta, ta.specs[0]);
  // AC is unreachable from {V0} but named in the spec body: kept.
  CHECK(r.automaton.location_index("AC").has_value());
  CHECK_FALSE(r.automaton.location_index("V1").has_value());
  bool noted = false;
  for (const auto& note : r.report.notes)
    if (note.find("AC") != std::string::npos && note.find("kept") != std::string::npos)
      noted = true;
  CHECK(noted);
}

TEST_CASE("simplify is idempotent") {
  for (const char* name : {"voting.ta", "broadcast.eta", "broadcast_weak_rc.eta"}) {
    ThresholdAutomaton ta = test::load_fixture(name);
    PreprocessResult once = run(ta, ta.specs[0]);
    PreprocessResult twice = run(once.automaton, once.automaton.specs[0]);
    CHECK_FALSE(twice.report.changed());
    CHECK(twice.automaton.locations == once.automaton.locations);
    CHECK(twice.automaton.rules.size() == once.automaton.rules.size());
  }
}

TEST_CASE("removal counts match the size differences") {
  ThresholdAutomaton ta = test::load_fixture("broadcast.eta");
  PreprocessResult r = run(ta, ta.specs[0]);
  CHECK((int)ta.locations.size() - (int)r.automaton.locations.size() ==
        r.report.locations_removed);
  CHECK((int)ta.rules.size() - (int)r.automaton.rules.size() ==
        r.report.self_loops_removed + r.report.unsat_guard_rules_removed +
            r.report.rules_removed_with_locations);
}
