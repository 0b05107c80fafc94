#include <benchmark/benchmark.h>

#include "tamc/checker.hpp"
#include "tamc/oracle.hpp"
#include "tamc/parser.hpp"

namespace {

tamc::ThresholdAutomaton load(const char* name) {
  auto r = tamc::parse_file(std::string(TAMC_FIXTURE_DIR) + "/" + name);
  return *r.automaton;
}

void run_checker(benchmark::State& state, const char* file, tamc::CheckerKind kind) {
  tamc::ThresholdAutomaton ta = load(file);
  tamc::CheckOptions options;
  options.checker = kind;
  for (auto _ : state) {
    auto v = tamc::run_check(ta, ta.specs[0], options);
    benchmark::DoNotOptimize(v);
  }
}

void BM_SmtCheckerFig2(benchmark::State& state) {
  run_checker(state, "voting.ta", tamc::CheckerKind::Smt);
}
BENCHMARK(BM_SmtCheckerFig2)->Unit(benchmark::kMillisecond);

void BM_ZcsCheckerFig2(benchmark::State& state) {
  run_checker(state, "voting.ta", tamc::CheckerKind::Zcs);
}
BENCHMARK(BM_ZcsCheckerFig2)->Unit(benchmark::kMillisecond);

void BM_AcsCheckerFig2(benchmark::State& state) {
  run_checker(state, "voting.ta", tamc::CheckerKind::Acs);
}
BENCHMARK(BM_AcsCheckerFig2)->Unit(benchmark::kMillisecond);

void BM_ZcsCheckerBroadcastUnsafe(benchmark::State& state) {
  run_checker(state, "broadcast_weak_rc.eta", tamc::CheckerKind::Zcs);
}
BENCHMARK(BM_ZcsCheckerBroadcastUnsafe)->Unit(benchmark::kMillisecond);

void BM_AcsCheckerBroadcastUnsafe(benchmark::State& state) {
  run_checker(state, "broadcast_weak_rc.eta", tamc::CheckerKind::Acs);
}
BENCHMARK(BM_AcsCheckerBroadcastUnsafe)->Unit(benchmark::kMillisecond);

void BM_OracleBroadcastSweep(benchmark::State& state) {
  tamc::ThresholdAutomaton ta = load("broadcast.eta");
  for (auto _ : state) {
    auto o = tamc::oracle::explore(ta, ta.specs[0], {4, 1, 1}, 40);
    benchmark::DoNotOptimize(o);
  }
}
BENCHMARK(BM_OracleBroadcastSweep);

}  // namespace

BENCHMARK_MAIN();
