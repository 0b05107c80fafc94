#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "common/random_mta.hpp"
#include "common/test_util.hpp"
#include "tamc/checker.hpp"

using namespace tamc;
using tamc::test::Rng;

namespace {

Verdict checked(const ThresholdAutomaton& ta, CheckerKind kind, bool preprocess) {
  CheckOptions options;
  options.checker = kind;
  options.preprocess = preprocess;
  return run_check(ta, ta.specs[0], options);
}

// Smoke-sized version of the acceptance agreement sweep.
void agree_on(const ThresholdAutomaton& ta, std::string label) {
  CAPTURE(label);
  Verdict smt = checked(ta, CheckerKind::Smt, true);
  Verdict zcs = checked(ta, CheckerKind::Zcs, true);
  REQUIRE_FALSE(smt.is_unknown());
  REQUIRE_FALSE(zcs.is_unknown());
  CHECK(smt.kind == zcs.kind);

  bool acs_supported = !error_condition(ta.specs[0]).has_emptiness_atom();
  if (acs_supported) {
    Verdict acs = checked(ta, CheckerKind::Acs, true);
    REQUIRE_FALSE(acs.is_unknown());
    CHECK(smt.kind == acs.kind);
  } else {
    try {
      checked(ta, CheckerKind::Acs, true);
      FAIL("ACS should refuse emptiness targets");
    } catch (const UnsupportedCheck& e) {
      CHECK(std::string(e.what()).find("target locations to be empty") != std::string::npos);
    }
  }

  // preprocessing preserves the verdict
  Verdict raw = checked(ta, CheckerKind::Smt, false);
  CHECK(raw.kind == smt.kind);

  if (smt.is_unsafe()) {
    // the parameterized verdict is confirmed by the oracle at the witness
    oracle::ReplayResult replay = oracle::replay(ta, *smt.trace);
    CHECK(replay.ok());
    oracle::Outcome at_witness = oracle::explore(ta, ta.specs[0], smt.trace->params);
    CHECK(at_witness.is_unsafe());
    oracle::ReplayResult zr = oracle::replay(ta, *zcs.trace);
    CHECK(zr.ok());
  } else {
    // consistent with the oracle on all RC valuations with n <= 6
    for (const auto& params : test::rc_valuations(ta, 6)) {
      if (params[0] > 6) continue;
      oracle::Outcome o = oracle::explore(ta, ta.specs[0], params);
      CHECK(o.is_safe());
    }
  }
}

}  // namespace

TEST_CASE("checkers and oracle agree on a random MTA sample") {
  Rng rng(0xACE0FBA5Eull);
  int generated = 0;
  while (generated < 10) {
    ThresholdAutomaton ta = test::random_mta(rng);
    if (ta.validate()) continue;
    std::ostringstream label;
    label << "instance " << generated;
    agree_on(ta, label.str());
    ++generated;
  }
}

TEST_CASE("checkers agree on the paper fixtures") {
  ThresholdAutomaton voting = test::load_fixture("voting.ta");
  agree_on(voting, "voting");
}
