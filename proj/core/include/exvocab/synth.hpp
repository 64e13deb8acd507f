#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exvocab/document.hpp"
#include "exvocab/ingest.hpp"
#include "exvocab/matrix.hpp"

namespace exvocab {

// A base word with either a constant containment probability or one per
// year (which must cover every generated year).
struct BaseWord {
  std::string word;
  double p = 0;
  std::map<int, double> trajectory;

  double at(int year) const;
};

// A block of documents sharing metadata. Without explicit groups the
// generator uses a single anonymous group.
struct SyntheticGroup {
  std::string name;
  std::optional<std::string> journal;
  std::optional<std::string> country;
  std::set<std::string> fields;
  std::optional<std::uint64_t> docs_per_year;  // falls back to the spec's value
  std::map<int, std::uint64_t> docs_by_year;   // per-year overrides
};

struct SyntheticSpec {
  int first_year = 2018;
  int last_year = 2024;
  std::uint64_t docs_per_year = 1000;
  std::vector<BaseWord> base_vocab;
  std::uint32_t min_filler = 0;  // filler tokens per document, uniform in [min, max]
  std::uint32_t max_filler = 0;
  std::uint32_t filler_lexicon = 2000;
  std::vector<SyntheticGroup> groups;
  std::uint64_t seed = 1;

  std::vector<int> years() const;
  std::uint64_t docs_in(const SyntheticGroup& g, int year) const;
  void validate() const;  // Error(kInvalidArgument) on bad probabilities or ranges

  // {"years": [lo, hi], "docs_per_year": n, "base_vocab": [{"word": w, "p": x} |
  //  {"word": w, "trajectory": {"2020": x, ...}}], "doc_length": {"min": a, "max": b},
  //  "filler_lexicon": n, "groups": [...], "seed": s}
  static SyntheticSpec from_json(std::string_view json);
  std::string to_json() const;
};

// Token-id representation; text is materialized on demand so 100k-document
// years stay cheap.
struct SyntheticDoc {
  int year = 0;
  std::uint32_t group = 0;
  std::uint32_t ordinal = 0;          // within (year), across groups
  std::vector<std::uint32_t> words;   // sorted ids into SyntheticCorpus::dictionary
  std::uint32_t filler_count = 0;
  std::uint64_t filler_seed = 0;
};

struct SyntheticCorpus {
  SyntheticSpec spec;
  std::vector<std::string> dictionary;  // base words, then injected markers
  std::vector<std::string> filler;      // pseudo-words disjoint from dictionary
  std::vector<SyntheticDoc> docs;       // grouped by year, ascending

  std::uint32_t word_id(std::string_view word);  // adds the word if new
  std::optional<std::uint32_t> find_word(std::string_view word) const;
  std::string doc_id(const SyntheticDoc& d) const;
  Document to_document(const SyntheticDoc& d) const;
  std::vector<Document> to_documents() const;
  // Per-year containment of a word set straight from the token ids.
  std::vector<std::uint64_t> containment(const std::set<std::string>& words,
                                         const std::vector<int>& years,
                                         std::vector<std::uint64_t>* totals = nullptr) const;
};

// Pure function of (spec, seed): the spec's own seed is replaced by `seed`.
SyntheticCorpus generate_corpus(const SyntheticSpec& spec, std::uint64_t seed);
SyntheticCorpus generate_corpus(const SyntheticSpec& spec);

struct InjectionSpec {
  int target_year = 2024;
  double fraction = 0;
  std::vector<std::string> marker_pool;
  std::uint32_t words_per_doc = 1;
  bool guarantee_novel = true;
  double censor_probability = 0;  // processed docs that then lose every pool word
  std::optional<std::string> group;  // restrict to one group by name

  void validate() const;
  static InjectionSpec from_json(std::string_view json);
};

struct InjectionResult {
  std::vector<std::uint8_t> injected;  // per document of the corpus, 1 = processed
  std::size_t processed = 0;
  std::size_t censored = 0;
};

// Mutates `corpus`. Exactly round(f * n) eligible documents are processed.
// Throws Error(kPoolExhausted) when guarantee_novel cannot be honoured.
InjectionResult inject_markers(SyntheticCorpus& corpus, const InjectionSpec& injection,
                               std::uint64_t seed);

std::string truth_csv(const SyntheticCorpus& corpus, const InjectionResult& result);  // id,injected

// Streams the corpus as text documents without materializing all of them.
class SyntheticSource final : public DocumentSource {
 public:
  explicit SyntheticSource(const SyntheticCorpus& corpus) : corpus_(&corpus) {}
  bool next(Document& doc) override;

 private:
  const SyntheticCorpus* corpus_;
  std::size_t pos_ = 0;
};

// Naive reference counter for tests: lowercases each text and searches for
// every word with an ASCII word-boundary check. No tokenizer, no sharing
// with the counting code. At most kOracleMaxDocs documents.
inline constexpr std::size_t kOracleMaxDocs = 10000;
OccurrenceMatrix oracle_counts(std::span<const Document> corpus, const std::vector<std::string>& words,
                               const std::vector<int>& years);

// splitmix64 step, used to derive independent per-year and per-doc seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace exvocab
