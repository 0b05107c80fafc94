#include <benchmark/benchmark.h>

#include "tamc/smt/builtin.hpp"

namespace {

using namespace tamc::smt;

// Feasible conjunctive system in the shape the path queries emit.
void BM_SolverConjunctiveSat(benchmark::State& state) {
  for (auto _ : state) {
    auto s = make_builtin_session(std::nullopt);
    for (int i = 0; i < 12; ++i) {
      s->declare_int("v" + std::to_string(i));
      s->assert_term(ge(var("v" + std::to_string(i)), lit(0)));
    }
    for (int i = 0; i + 1 < 12; ++i)
      s->assert_term(le(var("v" + std::to_string(i)),
                        add({var("v" + std::to_string(i + 1)), lit(3)})));
    s->assert_term(ge(var("v0"), lit(5)));
    benchmark::DoNotOptimize(s->check());
  }
}
BENCHMARK(BM_SolverConjunctiveSat);

// Case splits over disjunctions with an unsatisfiable core.
void BM_SolverDisjunctiveUnsat(benchmark::State& state) {
  for (auto _ : state) {
    auto s = make_builtin_session(std::nullopt);
    s->declare_int("x");
    s->declare_int("y");
    s->assert_term(ge(var("x"), lit(0)));
    s->assert_term(ge(var("y"), lit(0)));
    for (int i = 0; i < 6; ++i)
      s->assert_term(lor({eq(var("x"), lit(i)), eq(var("y"), lit(i))}));
    s->assert_term(ge(add({var("x"), var("y")}), lit(100)));
    benchmark::DoNotOptimize(s->check());
  }
}
BENCHMARK(BM_SolverDisjunctiveUnsat);

}  // namespace
