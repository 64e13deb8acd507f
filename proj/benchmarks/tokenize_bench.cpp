#include <benchmark/benchmark.h>

#include "corpus.hpp"
#include "exvocab/tokenize.hpp"

namespace {

using namespace exvocab;

void BM_ForEachToken(benchmark::State& state) {
  const auto docs = bench::abstracts(250, 4).to_documents();
  std::string scratch;
  std::size_t bytes = 0;
  for (auto _ : state) {
    std::size_t n = 0;
    for (const auto& d : docs) {
      for_each_token(d.text, scratch, [&](std::string_view t) { n += t.size(); });
      bytes += d.text.size();
    }
    benchmark::DoNotOptimize(n);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * docs.size()));
}
BENCHMARK(BM_ForEachToken);

void BM_TokenSet(benchmark::State& state) {
  const auto docs = bench::abstracts(250, 4).to_documents();
  for (auto _ : state) {
    for (const auto& d : docs) benchmark::DoNotOptimize(tokenize(d.text));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * docs.size()));
}
BENCHMARK(BM_TokenSet);

}  // namespace
