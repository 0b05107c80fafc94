#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common/test_util.hpp"
#include "tamc/smt/builtin.hpp"
#include "tamc/smt/solver.hpp"

using namespace tamc::smt;

namespace {

std::unique_ptr<SolverSession> session_under_test(bool process) {
  if (process) return open_session({TAMC_SMT_BIN, std::nullopt});
  return make_builtin_session(std::nullopt);
}

void exercise_basics(SolverSession& s) {
  s.declare_int("x");
  s.assert_term(eq(var("x"), lit(3)));
  SmtResult r = s.check();
  REQUIRE(r.is_sat());
  CHECK(r.model.at("x") == 3);

  s.push();
  s.assert_term(ge(var("x"), lit(1)));
  s.assert_term(le(var("x"), lit(0)));
  CHECK(s.check().is_unsat());
  s.pop();
  CHECK(s.check().is_sat());
}

void exercise_push_pop_discipline(SolverSession& s) {
  s.declare_int("a");
  s.declare_int("b");
  s.assert_term(ge(var("a"), lit(0)));
  CHECK(s.depth() == 0);
  REQUIRE(s.check().is_sat());

  // After pop, the observable assertion set equals the set before the
  // matching push, witnessed by sentinel constraints.
  s.push();
  CHECK(s.depth() == 1);
  s.assert_term(eq(var("a"), lit(7)));
  s.push();
  CHECK(s.depth() == 2);
  s.assert_term(lnot(eq(var("a"), lit(7))));
  CHECK(s.check().is_unsat());
  s.pop();
  SmtResult mid = s.check();
  REQUIRE(mid.is_sat());
  CHECK(mid.model.at("a") == 7);
  s.pop();
  CHECK(s.depth() == 0);
  s.assert_term(eq(var("a"), lit(5)));
  SmtResult r = s.check();
  REQUIRE(r.is_sat());
  CHECK(r.model.at("a") == 5);
}

void exercise_lia(SolverSession& s) {
  // 3x = 2 has no integer solution
  s.push();
  s.declare_int("u");
  s.assert_term(eq(mul(3, var("u")), lit(2)));
  CHECK(s.check().is_unsat());
  s.pop();

  // boolean structure: (x >= 1 => y >= 5) && x >= 2 && y <= 10
  s.push();
  s.declare_int("x");
  s.declare_int("y");
  s.assert_term(implies(ge(var("x"), lit(1)), ge(var("y"), lit(5))));
  s.assert_term(ge(var("x"), lit(2)));
  s.assert_term(le(var("y"), lit(10)));
  SmtResult r = s.check();
  REQUIRE(r.is_sat());
  CHECK(r.model.at("x") >= 2);
  CHECK(r.model.at("y") >= 5);
  CHECK(r.model.at("y") <= 10);
  s.pop();

  // disjunction forced one way
  s.push();
  s.declare_int("z");
  s.assert_term(lor({eq(var("z"), lit(4)), eq(var("z"), lit(9))}));
  s.assert_term(lnot(eq(var("z"), lit(4))));
  SmtResult r2 = s.check();
  REQUIRE(r2.is_sat());
  CHECK(r2.model.at("z") == 9);
  s.pop();

  // unbounded but constrained modulo: 2a = 3b + 1, a,b >= 0
  s.push();
  s.declare_int("a2");
  s.declare_int("b2");
  s.assert_term(ge(var("a2"), lit(0)));
  s.assert_term(ge(var("b2"), lit(0)));
  s.assert_term(eq(mul(2, var("a2")), add({mul(3, var("b2")), lit(1)})));
  SmtResult r3 = s.check();
  REQUIRE(r3.is_sat());
  CHECK(2 * r3.model.at("a2") == 3 * r3.model.at("b2") + 1);
  s.pop();
}

}  // namespace

TEST_CASE("in-process engine: basics, stack discipline, integer reasoning") {
  auto s1 = session_under_test(false);
  exercise_basics(*s1);
  auto s2 = session_under_test(false);
  exercise_push_pop_discipline(*s2);
  auto s3 = session_under_test(false);
  exercise_lia(*s3);
}

TEST_CASE("process client over the bundled solver binary") {
  auto s1 = session_under_test(true);
  exercise_basics(*s1);
  auto s2 = session_under_test(true);
  exercise_push_pop_discipline(*s2);
  auto s3 = session_under_test(true);
  exercise_lia(*s3);
}

TEST_CASE("spawning a nonexistent solver fails cleanly") {
  CHECK_THROWS_AS(open_session({"/nonexistent/solver/binary -in", std::nullopt}),
                  SolverError);
  try {
    open_session({"/nonexistent/solver/binary -in", std::nullopt});
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::SpawnFailure);
  }
}

TEST_CASE("a non-solver process fails the handshake") {
  try {
    open_session({"/bin/cat", std::nullopt});
    FAIL("handshake against cat should not succeed");
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::HandshakeFailure);
  }
}

TEST_CASE("a dead solver surfaces as unknown, not a wrong verdict") {
  // 'true' exits immediately after consuming nothing.
  try {
    auto s = open_session({"/bin/true", std::nullopt});
    FAIL("handshake should fail against /bin/true");
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::HandshakeFailure);
  }
}

TEST_CASE("per-query deadline surfaces as unknown") {
  auto s = make_builtin_session(std::chrono::steady_clock::now() -
                                std::chrono::milliseconds(1));
  s->declare_int("x");
  s->assert_term(ge(var("x"), lit(0)));
  CHECK(s->check().is_unknown());
}

TEST_CASE("pop without a matching push is an error") {
  auto s = make_builtin_session(std::nullopt);
  CHECK_THROWS(s->pop());
}

TEST_CASE("models cover every declared constant") {
  for (bool process : {false, true}) {
    auto s = session_under_test(process);
    s->declare_int("p");
    s->declare_int("q");
    s->declare_int("unused");
    s->assert_term(ge(var("p"), lit(2)));
    s->assert_term(eq(var("q"), add({var("p"), lit(1)})));
    SmtResult r = s->check();
    REQUIRE(r.is_sat());
    CHECK(r.model.size() == 3);
    CHECK(r.model.count("unused") == 1);
    CHECK(r.model.at("q") == r.model.at("p") + 1);
  }
}
