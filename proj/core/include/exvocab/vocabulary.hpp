#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exvocab/document.hpp"

namespace exvocab {

class DocumentSource;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

// Lexicographically ordered word list with O(1) lookup.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Sorts and deduplicates.
  explicit Vocabulary(std::vector<std::string> words);

  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  std::optional<std::uint32_t> index(std::string_view word) const;
  bool contains(std::string_view word) const { return index(word).has_value(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  StringMap<std::uint32_t> index_;
};

struct VocabularyOptions {
  double min_df = 1e-6;       // fraction of all documents
  bool eligible_only = true;  // keep only >= 4 letters a-z; otherwise every token of >= 2 chars
};

// Document-frequency accumulator for the first corpus pass. Builders from
// disjoint shards merge by summing.
class VocabularyBuilder {
 public:
  explicit VocabularyBuilder(VocabularyOptions options = {}) : options_(options) {}

  void add(const Document& doc);
  void merge(const VocabularyBuilder& other);
  std::uint64_t documents() const { return documents_; }
  // Throws Error(kEmptyCorpus) when no documents were added.
  Vocabulary finish() const;

 private:
  struct Entry {
    std::uint64_t df = 0;
    std::uint64_t last_doc = 0;
  };
  VocabularyOptions options_;
  StringMap<Entry> entries_;
  std::uint64_t documents_ = 0;
  std::string scratch_;
};

Vocabulary build_vocabulary(DocumentSource& corpus, VocabularyOptions options = {},
                            unsigned workers = 1);
Vocabulary build_vocabulary(std::span<const Document> corpus, VocabularyOptions options = {});

// One word per line, `#` comments and blank lines ignored.
std::vector<std::string> parse_word_list(std::string_view contents);

}  // namespace exvocab
