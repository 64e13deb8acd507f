// The packaged benchmark_main archive carries LTO objects tied to one
// compiler release, so the entry point lives here instead.
#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
