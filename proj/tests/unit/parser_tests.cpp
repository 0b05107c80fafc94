#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common/test_util.hpp"
#include "tamc/render.hpp"

using namespace tamc;

TEST_CASE("voting fixture parses into the expected structure") {
  ParseResult r = parse_file(test::fixture_path("voting.ta"));
  REQUIRE(r.ok());
  const ThresholdAutomaton& ta = *r.automaton;
  CHECK(ta.name == "ALG1");
  CHECK(ta.kind == AutomatonKind::Mta);
  CHECK(ta.locations.size() == 5);
  CHECK(ta.shared.size() == 2);
  CHECK(ta.params.size() == 2);
  CHECK(ta.rules.size() == 4);
  REQUIRE(ta.specs.size() == 1);
  CHECK(ta.specs[0].name == "cor");
  // bracket indices define the ordering
  CHECK(ta.locations[0] == "V0");
  CHECK(ta.locations[4] == "WAIT");
  // initial locations are the ones not pinned to zero
  REQUIRE(ta.initial.size() == 2);
  CHECK(ta.locations[ta.initial[0]] == "V0");
  CHECK(ta.locations[ta.initial[1]] == "V1");
  // do { x0' := x0 + 1; } parses as update +1
  CHECK(ta.rules[0].updates[0] == 1);
  CHECK(ta.rules[0].updates[1] == 0);
  CHECK(ta.rules[0].guard.is_true());
}

TEST_CASE("reliable-broadcast fixture parses with resets and becomes an ETA") {
  ParseResult r = parse_file(test::fixture_path("broadcast.eta"));
  REQUIRE(r.ok());
  const ThresholdAutomaton& ta = *r.automaton;
  CHECK(ta.kind == AutomatonKind::Eta);
  CHECK(ta.locations.size() == 5);
  CHECK(ta.rules.size() == 8);
  auto nsnt = ta.shared_index("nsnt");
  auto rec = ta.shared_index("rec");
  REQUIRE(nsnt);
  REQUIRE(rec);
  // rule 6: rec' := 0; nsnt' := 0;
  CHECK(ta.rules[6].resets == std::set<int>{*nsnt, *rec});
  CHECK(ta.rules[6].updates == std::vector<std::int64_t>{0, 0});
  // rule 4 guard follows the source text: rec >= n-f && nsnt > t+1-f
  REQUIRE(ta.rules[4].guard.conjuncts.size() == 2);
  CHECK(ta.rules[4].guard.conjuncts[0].kind == GuardKind::Lower);
  CHECK(ta.rules[4].guard.conjuncts[1].kind == GuardKind::Lower);
  // the comment in the inits section is ignored
  CHECK(ta.init_constraints.size() == 4);  // shared inits are validated and dropped
}

TEST_CASE("cardinality mismatches are errors for rules and warnings for inits") {
  std::string bad = R"(ta X {
    shared x;
    parameters n;
    assumptions (1) { n > 0; }
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (3) {
        0: A -> B when (true) do {};
        1: B -> A when (true) do {};
        2: A -> B when (x >= n) do {};
        3: B -> A when (true) do {};
    }
    specifications (0) { }
})";
  ParseResult r = parse(bad, "bad.ta");
  CHECK_FALSE(r.ok());
  REQUIRE(r.has_errors());
  bool found = false;
  for (const auto& d : r.diagnostics)
    if (d.message.find("declares 3 entries but contains 4") != std::string::npos) found = true;
  CHECK(found);

  ParseResult listing = parse_file(test::fixture_path("voting.ta"));
  REQUIRE(listing.ok());
  int warnings = 0;
  for (const auto& d : listing.diagnostics)
    if (d.severity == Severity::Warning) ++warnings;
  CHECK(warnings == 2);  // assumptions (2) with 1 entry, inits (4) with 6
}

TEST_CASE("every parse failure carries an error diagnostic with a span") {
  std::ifstream in(test::fixture_path("voting.ta"));
  std::stringstream buf;
  buf << in.rdbuf();
  std::string source = buf.str();
  int lines = 1;
  for (char c : source)
    if (c == '\n') ++lines;
  // Truncations of the valid fixture either parse or diagnose with a span
  // inside the source.
  for (std::size_t cut = 0; cut < source.size(); cut += 17) {
    ParseResult r = parse(source.substr(0, cut), "cut.ta");
    if (r.ok()) continue;
    REQUIRE(r.has_errors());
    bool in_range = false;
    for (const auto& d : r.diagnostics)
      if (d.severity == Severity::Error && d.span.line >= 1 && d.span.line <= lines &&
          d.span.column >= 1)
        in_range = true;
    CHECK(in_range);
  }
}

TEST_CASE("unknown and duplicate identifiers are rejected") {
  std::string unknown = R"(ta X {
    shared x;
    parameters n;
    locations (1) { A: [0]; }
    rules (1) { 0: A -> B when (true) do {}; }
})";
  ParseResult r1 = parse(unknown, "u.ta");
  CHECK_FALSE(r1.ok());
  bool found = false;
  for (const auto& d : r1.diagnostics)
    if (d.message.find("unknown location 'B'") != std::string::npos) found = true;
  CHECK(found);

  std::string dup = R"(ta X {
    shared x, x;
    parameters n;
    locations (1) { A: [0]; }
    rules (0) { }
})";
  ParseResult r2 = parse(dup, "d.ta");
  CHECK_FALSE(r2.ok());
  found = false;
  for (const auto& d : r2.diagnostics)
    if (d.message.find("duplicate identifier 'x'") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("a .ta file with resets is promoted to ETA with a warning") {
  std::string source = R"(ta X {
    shared x;
    parameters n;
    assumptions (1) { n > 0; }
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (1) { 0: A -> B when (true) do { x' := 0; }; }
    specifications (0) { }
})";
  ParseResult r = parse(source, "promoted.ta");
  REQUIRE(r.ok());
  CHECK(r.automaton->kind == AutomatonKind::Eta);
  bool warned = false;
  for (const auto& d : r.diagnostics)
    if (d.severity == Severity::Warning &&
        d.message.find("treating the automaton as an ETA") != std::string::npos)
      warned = true;
  CHECK(warned);

  // the same body under the .eta extension is an ETA without the warning
  ParseResult r2 = parse(source, "fine.eta");
  REQUIRE(r2.ok());
  CHECK(r2.automaton->kind == AutomatonKind::Eta);
  for (const auto& d : r2.diagnostics) CHECK(d.severity != Severity::Warning);
}

TEST_CASE("guard desugarings cover equality and strict comparisons") {
  std::string source = R"(ta X {
    shared x;
    parameters n;
    assumptions (1) { n > 0; }
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (4) {
        0: A -> B when (x == 0) do {};
        1: A -> B when (x == n) do {};
        2: A -> B when (x > n) do {};
        3: A -> B when (x < n) do {};
    }
    specifications (0) { }
})";
  ParseResult r = parse(source, "g.ta");
  REQUIRE(r.ok());
  const auto& rules = r.automaton->rules;
  // x == 0 ~> 1 > x
  REQUIRE(rules[0].guard.conjuncts.size() == 1);
  CHECK(rules[0].guard.conjuncts[0].kind == GuardKind::Upper);
  CHECK(rules[0].guard.conjuncts[0].threshold == LinearExpr(Rational(1)));
  // x == n ~> n <= x && n + 1 > x
  REQUIRE(rules[1].guard.conjuncts.size() == 2);
  CHECK(rules[1].guard.conjuncts[0].kind == GuardKind::Lower);
  CHECK(rules[1].guard.conjuncts[1].kind == GuardKind::Upper);
  // x > n ~> n + 1 <= x
  REQUIRE(rules[2].guard.conjuncts.size() == 1);
  CHECK(rules[2].guard.conjuncts[0].kind == GuardKind::Lower);
  CHECK(rules[2].guard.conjuncts[0].threshold ==
        LinearExpr::param(0) + LinearExpr(Rational(1)));
  // x < n ~> n > x
  REQUIRE(rules[3].guard.conjuncts.size() == 1);
  CHECK(rules[3].guard.conjuncts[0].kind == GuardKind::Upper);
  CHECK(rules[3].guard.conjuncts[0].threshold == LinearExpr::param(0));
}

TEST_CASE("inconsistent shared-variable inits are rejected") {
  std::string source = R"(ta X {
    shared x;
    parameters n;
    locations (1) { A: [0]; }
    inits (2) { A == n; x == 1; }
    rules (0) { }
})";
  ParseResult r = parse(source, "i.ta");
  CHECK_FALSE(r.ok());
  bool found = false;
  for (const auto& d : r.diagnostics)
    if (d.message.find("shared variables are 0") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("specifications outside the safety grammar are rejected") {
  std::string base = R"(ta X {
    shared x;
    parameters n;
    locations (2) { A: [0]; B: [1]; }
    inits (1) { A + B == n; }
    rules (1) { 0: A -> B when (true) do {}; }
    specifications (1) { bad: %s }
})";
  auto with_spec = [&](const std::string& spec) {
    std::string s = base;
    s.replace(s.find("%s"), 2, spec);
    return parse(s, "s.ta");
  };
  CHECK_FALSE(with_spec("A == 0").ok());            // no globally operator
  CHECK_FALSE(with_spec("[](A >= 2) -> [](B == 0)").ok());  // box left of ->
  CHECK_FALSE(with_spec("[](!(A >= 2))").ok());     // count upper bounds unsupported
  CHECK(with_spec("[](A >= 2)").ok());
  CHECK(with_spec("[](!(A > 0 && B > 0))").ok());
  CHECK(with_spec("A == 0 -> [](B == 0)").ok());
  CHECK(with_spec("[](x < n || A == 0)").ok());     // gform || cform
  CHECK(with_spec("[](A == 0 && B == 0)").ok());    // splits into two pforms
}

TEST_CASE("round-trip render/parse is stable on all fixtures") {
  for (const char* name : {"voting.ta", "broadcast.eta", "broadcast_weak_rc.eta", "broadcast_core.eta"}) {
    ThresholdAutomaton ta = test::load_fixture(name);
    std::string once = render(ta);
    ParseResult again = parse(once, std::string("re.") + (ta.kind == AutomatonKind::Eta
                                                              ? "eta"
                                                              : "ta"));
    REQUIRE(again.ok());
    CHECK(render(*again.automaton) == once);
    // structural fidelity
    CHECK(again.automaton->locations == ta.locations);
    CHECK(again.automaton->shared == ta.shared);
    CHECK(again.automaton->params == ta.params);
    CHECK(again.automaton->initial == ta.initial);
    CHECK(again.automaton->rules.size() == ta.rules.size());
    for (std::size_t i = 0; i < ta.rules.size(); ++i) {
      CHECK(again.automaton->rules[i].from == ta.rules[i].from);
      CHECK(again.automaton->rules[i].to == ta.rules[i].to);
      CHECK(again.automaton->rules[i].updates == ta.rules[i].updates);
      CHECK(again.automaton->rules[i].resets == ta.rules[i].resets);
      CHECK(again.automaton->rules[i].guard == ta.rules[i].guard);
    }
  }
}

TEST_CASE("comments are ignored wherever whitespace is legal") {
  std::string source = R"(ta /* name */ X {
    shared x; /* one shared */
    parameters n;
    locations (2) { A: [0]; /* mid */ B: [1]; }
    inits (1) { A + B == n /* trailing */; }
    rules (1) { 0: A /* here too */ -> B when (x >= n /* thr */) do {}; }
    specifications (0) { }
})";
  ParseResult r = parse(source, "c.ta");
  REQUIRE(r.ok());
  CHECK(r.automaton->locations.size() == 2);
}

TEST_CASE("render emits resets and true guards in the file syntax") {
  ThresholdAutomaton ta = test::load_fixture("broadcast.eta");
  std::string text = render(ta);
  CHECK(text.find("rec' := 0;") != std::string::npos);
  CHECK(text.find("nsnt' := 0;") != std::string::npos);
  CHECK(text.find("when (true)") != std::string::npos);
}
