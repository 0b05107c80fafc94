#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "tamc/parser.hpp"
#include "tamc/render.hpp"

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(TAMC_FIXTURE_DIR) + "/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void BM_ParseListing1(benchmark::State& state) {
  std::string source = fixture("voting.ta");
  for (auto _ : state) {
    auto r = tamc::parse(source, "voting.ta");
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ParseListing1);

void BM_ParseReliableBroadcast(benchmark::State& state) {
  std::string source = fixture("broadcast.eta");
  for (auto _ : state) {
    auto r = tamc::parse(source, "broadcast.eta");
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ParseReliableBroadcast);

void BM_RenderRoundTrip(benchmark::State& state) {
  auto parsed = tamc::parse(fixture("broadcast.eta"), "broadcast.eta");
  for (auto _ : state) {
    std::string text = tamc::render(*parsed.automaton);
    benchmark::DoNotOptimize(text);
  }
}
BENCHMARK(BM_RenderRoundTrip);

}  // namespace
