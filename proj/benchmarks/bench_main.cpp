#include <benchmark/benchmark.h>

#include <string>

#include "brailleband/distributions.hpp"
#include "brailleband/emulator.hpp"
#include "brailleband/link.hpp"
#include "brailleband/stats.hpp"

namespace {

using namespace brailleband;

const std::string kSentence = "the quick brown fox jumps over the lazy dog 1234567890";

std::string text_of_length(std::size_t n) {
  std::string s;
  while (s.size() < n) s += kSentence + ' ';
  s.resize(n);
  return s;
}

void BM_EncodeText(benchmark::State& state) {
  const auto text = text_of_length(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encode_text(text));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeText)->Range(8, 4096);

void BM_ScheduleText(benchmark::State& state) {
  const auto tokens = encode_text(text_of_length(static_cast<std::size_t>(state.range(0))));
  const auto cfg = TimingConfig::with_gap(std::chrono::milliseconds{1000});
  for (auto _ : state) benchmark::DoNotOptimize(schedule_text(tokens, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScheduleText)->Range(8, 4096);

void BM_LinkRoundtrip(benchmark::State& state) {
  const auto text = text_of_length(static_cast<std::size_t>(state.range(0)));
  const auto cfg = TimingConfig::with_gap(std::chrono::milliseconds{1000});
  for (auto _ : state) benchmark::DoNotOptimize(link_roundtrip(text, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LinkRoundtrip)->Range(8, 4096);

void BM_Emulate(benchmark::State& state) {
  const auto trace = link_roundtrip(text_of_length(static_cast<std::size_t>(state.range(0))),
                                    TimingConfig::with_gap(std::chrono::milliseconds{1000}));
  for (auto _ : state) benchmark::DoNotOptimize(apply_commands(trace.commands, trace.end_of_transmission));
}
BENCHMARK(BM_Emulate)->Range(8, 4096);

void BM_AnovaReadingSpeedTable(benchmark::State& state) {
  const auto& table = reading_speed_table();
  for (auto _ : state) benchmark::DoNotOptimize(anova_from_summary(table));
}
BENCHMARK(BM_AnovaReadingSpeedTable);

void BM_PairwiseHolm(benchmark::State& state) {
  const auto& table = reading_speed_table();
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_vs_reference(table, 1500));
}
BENCHMARK(BM_PairwiseHolm);

void BM_TTail(benchmark::State& state) {
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t_sf(t, 63.0));
    t = t > 8.0 ? 0.0 : t + 0.37;
  }
}
BENCHMARK(BM_TTail);

}  // namespace
BENCHMARK_MAIN();
