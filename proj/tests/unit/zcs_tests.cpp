#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common/test_util.hpp"
#include "tamc/zcs_checker.hpp"

using namespace tamc;

namespace {

Verdict zcs(const ThresholdAutomaton& ta, const SafetySpec& spec, ZcsOptions options = {}) {
  smt::SessionFactory sessions;
  return zcs_check(ta, spec, sessions, options);
}

}  // namespace

TEST_CASE("voting is safe") {
  ThresholdAutomaton ta = test::load_fixture("voting.ta");
  CHECK(zcs(ta, ta.specs[0]).is_safe());
}

TEST_CASE("the reliable-broadcast validity property is safe") {
  ThresholdAutomaton ta = test::load_fixture("broadcast.eta");
  CHECK(zcs(ta, ta.specs[0]).is_safe());
}

TEST_CASE("with the weakened resilience condition AC becomes reachable") {
  ThresholdAutomaton ta = test::load_fixture("broadcast_weak_rc.eta");
  Verdict v = zcs(ta, ta.specs[0]);
  REQUIRE(v.is_unsafe());
  oracle::ReplayResult r = oracle::replay(ta, *v.trace);
  REQUIRE(r.ok());
  auto ac = ta.location_index("AC");
  CHECK(r.final_config->counts[*ac] >= 1);
  // the witness admits more faults than the bound (f > t)
  auto t_idx = ta.param_index("t");
  auto f_idx = ta.param_index("f");
  CHECK(v.trace->params[*f_idx] > v.trace->params[*t_idx]);
}

TEST_CASE("weakened voting yields an oracle-accepted counterexample") {
  std::string source = R"(ta W {
    shared x0, x1;
    parameters n, t;
    assumptions (1) { n > 3 * t; }
    locations (5) { V0: [0]; V1: [1]; D0: [2]; D1: [3]; WAIT: [4]; }
    inits (4) { WAIT == 0; D0 == 0; D1 == 0; V1 + V0 == n; }
    rules (4) {
        0: V0 -> WAIT when (true) do { x0' := x0 + 1; };
        1: V1 -> WAIT when (true) do { x1' := x1 + 1; };
        2: WAIT -> D0 when (x0 >= t) do {};
        3: WAIT -> D1 when (x1 >= t) do {};
    }
    specifications (1) { cor: [](!(D0 > 0 && D1 > 0)) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source);
  Verdict v = zcs(ta, ta.specs[0]);
  REQUIRE(v.is_unsafe());
  CHECK(oracle::replay(ta, *v.trace).ok());
}

TEST_CASE("tiny budgets yield UNKNOWN on an unsafe ETA, never SAFE") {
  ThresholdAutomaton ta = test::load_fixture("broadcast_weak_rc.eta");
  ZcsOptions tiny;
  tiny.max_path_len = 1;
  Verdict v1 = zcs(ta, ta.specs[0], tiny);
  CHECK(v1.is_unknown());

  ZcsOptions tiny2;
  tiny2.max_expansions = 1;
  Verdict v2 = zcs(ta, ta.specs[0], tiny2);
  CHECK(v2.is_unknown());
}

TEST_CASE("verdicts are deterministic and match across jobs") {
  ThresholdAutomaton ta = test::load_fixture("broadcast_weak_rc.eta");
  Verdict v1 = zcs(ta, ta.specs[0]);
  ZcsOptions par;
  par.jobs = 4;
  Verdict v2 = zcs(ta, ta.specs[0], par);
  REQUIRE(v1.is_unsafe());
  REQUIRE(v2.is_unsafe());
  CHECK(v1.trace->params == v2.trace->params);
  REQUIRE(v1.trace->steps.size() == v2.trace->steps.size());
  for (std::size_t i = 0; i < v1.trace->steps.size(); ++i)
    CHECK(v1.trace->steps[i].rule == v2.trace->steps[i].rule);
}

TEST_CASE("unsatisfiable RC is vacuously safe") {
  std::string source = R"(ta EMPTY {
    shared x;
    parameters n;
    assumptions (2) { n > 3; n < 2; }
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (1) { 0: A -> B when (true) do { x' := 0; }; }
    specifications (1) { s: [](B == 0) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source, "e.eta");
  CHECK(zcs(ta, ta.specs[0]).is_safe());
}
