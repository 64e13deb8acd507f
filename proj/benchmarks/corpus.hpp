#pragma once

// Shared synthetic inputs for the benchmarks.

#include "exvocab/synth.hpp"

namespace exvocab::bench {

// Abstract-sized documents (~1.5 kB) over a 20k-word filler lexicon.
inline SyntheticCorpus abstracts(std::uint64_t docs_per_year, int years = 4) {
  SyntheticSpec s;
  s.first_year = 2021;
  s.last_year = 2021 + years - 1;
  s.docs_per_year = docs_per_year;
  s.base_vocab = {{"patients", 0.3, {}}, {"results", 0.4, {}}, {"delves", 0.002, {}}, {"within", 0.05, {}}};
  s.min_filler = 145;
  s.max_filler = 190;
  s.filler_lexicon = 20000;
  return generate_corpus(s, 7);
}

}  // namespace exvocab::bench
