#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common/test_util.hpp"
#include "tamc/checker.hpp"
#include "tamc/smt/builtin.hpp"
#include "tamc/smt_checker.hpp"

using namespace tamc;

namespace {

Verdict check(const ThresholdAutomaton& ta, const SafetySpec& spec) {
  auto session = smt::make_builtin_session(std::nullopt);
  return smt_check(ta, spec, *session);
}

std::string weakened_source(const char* guard0, const char* guard1) {
  std::string s = R"(ta W {
    shared x0, x1;
    parameters n, t;
    assumptions (1) { n > 3 * t; }
    locations (5) { V0: [0]; V1: [1]; D0: [2]; D1: [3]; WAIT: [4]; }
    inits (4) { WAIT == 0; D0 == 0; D1 == 0; V1 + V0 == n; }
    rules (4) {
        0: V0 -> WAIT when (true) do { x0' := x0 + 1; };
        1: V1 -> WAIT when (true) do { x1' := x1 + 1; };
        2: WAIT -> D0 when (%G0) do {};
        3: WAIT -> D1 when (%G1) do {};
    }
    specifications (1) { cor: [](!(D0 > 0 && D1 > 0)) }
})";
  s.replace(s.find("%G0"), 3, guard0);
  s.replace(s.find("%G1"), 3, guard1);
  return s;
}

}  // namespace

TEST_CASE("voting with the real guards is safe") {
  ThresholdAutomaton ta = test::load_fixture("voting.ta");
  Verdict v = check(ta, ta.specs[0]);
  CHECK(v.is_safe());
}

TEST_CASE("voting with weakened guards is unsafe and the trace replays") {
  ThresholdAutomaton ta =
      test::parse_or_throw(weakened_source("x0 >= t", "x1 >= t"), "w.ta");
  Verdict v = check(ta, ta.specs[0]);
  REQUIRE(v.is_unsafe());
  REQUIRE(v.trace.has_value());
  oracle::ReplayResult r = oracle::replay(ta, *v.trace);
  REQUIRE(r.ok());
  CHECK(r.final_config->counts[2] >= 1);  // D0
  CHECK(r.final_config->counts[3] >= 1);  // D1
  // the oracle confirms a violation exists at n=4, t=1
  oracle::Outcome o = oracle::explore(ta, ta.specs[0], {4, 1});
  CHECK(o.is_unsafe());
  // and the witness parameters themselves admit a violation
  oracle::Outcome at_witness = oracle::explore(ta, ta.specs[0], v.trace->params);
  CHECK(at_witness.is_unsafe());
}

TEST_CASE("an error condition contradicting the init constraints is unsat") {
  // error requires processes in B while the initial total is pinned to 0
  std::string source = R"(ta Z {
    shared x;
    parameters n;
    assumptions (1) { n >= 0; }
    locations (2) { A: [0]; B: [1]; }
    inits (2) { A + B == n - n; B == 0; }
    rules (1) { 0: A -> B when (true) do {}; }
    specifications (1) { s: [](B == 0) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source);
  Verdict v = check(ta, ta.specs[0]);
  CHECK(v.is_safe());
}

TEST_CASE("the checker refuses an ETA") {
  ThresholdAutomaton ta = test::load_fixture("broadcast.eta");
  auto session = smt::make_builtin_session(std::nullopt);
  CHECK_THROWS_AS(smt_check(ta, ta.specs[0], *session), UnsupportedCheck);
}

TEST_CASE("verdicts are stable under guard-atom reordering") {
  // Swapping the conjunct order only permutes segment interpretation.
  std::string a = weakened_source("(x0 >= t) && (x1 < n)", "x1 >= t");
  std::string b = weakened_source("(x1 < n) && (x0 >= t)", "x1 >= t");
  ThresholdAutomaton ta = test::parse_or_throw(a, "a.ta");
  ThresholdAutomaton tb = test::parse_or_throw(b, "b.ta");
  Verdict va = check(ta, ta.specs[0]);
  Verdict vb = check(tb, tb.specs[0]);
  CHECK(va.kind == vb.kind);
}

TEST_CASE("traces are deterministic across runs") {
  ThresholdAutomaton ta =
      test::parse_or_throw(weakened_source("x0 >= t", "x1 >= t"), "w.ta");
  Verdict v1 = check(ta, ta.specs[0]);
  Verdict v2 = check(ta, ta.specs[0]);
  REQUIRE(v1.is_unsafe());
  REQUIRE(v2.is_unsafe());
  CHECK(v1.trace->params == v2.trace->params);
  REQUIRE(v1.trace->steps.size() == v2.trace->steps.size());
  for (std::size_t i = 0; i < v1.trace->steps.size(); ++i) {
    CHECK(v1.trace->steps[i].rule == v2.trace->steps[i].rule);
    CHECK(v1.trace->steps[i].count == v2.trace->steps[i].count);
  }
}

TEST_CASE("dead solver mid-query yields unknown") {
  ThresholdAutomaton ta = test::load_fixture("voting.ta");
  // a solver with an immediate deadline dies before answering
  auto session = smt::make_builtin_session(std::chrono::steady_clock::now() -
                                           std::chrono::milliseconds(1));
  Verdict v = smt_check(ta, ta.specs[0], *session);
  CHECK(v.is_unknown());
}

TEST_CASE("segment scheduling handles token routing through cycles") {
  // One process must shuttle between locations to realize repeated firings;
  // reconstruction must order blocks by the executability certificate.
  std::string source = R"(ta CY {
    shared x;
    parameters n;
    assumptions (1) { n > 0; }
    locations (3) { A: [0]; B: [1]; C: [2]; }
    inits (3) { B == 0; C == 0; A == n; }
    rules (3) {
        0: A -> B when (true) do { x' := x + 1; };
        1: B -> A when (true) do {};
        2: B -> C when (x >= 3) do {};
    }
    specifications (1) { s: [](C == 0) }
})";
  ThresholdAutomaton ta = test::parse_or_throw(source);
  Verdict v = check(ta, ta.specs[0]);
  REQUIRE(v.is_unsafe());
  oracle::ReplayResult r = oracle::replay(ta, *v.trace);
  REQUIRE(r.ok());
  // n = 1 forces the ping-pong: the single process pumps x alone
  oracle::Outcome o = oracle::explore(ta, ta.specs[0], {1});
  CHECK(o.is_unsafe());
}
