#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exvocab/vocabulary.hpp"

namespace exvocab {

// Word x year document-occurrence counts plus per-year document totals.
// counts(w, y) is the number of documents of year y containing w at least
// once; totals(y) the number of documents of year y.
class OccurrenceMatrix {
 public:
  OccurrenceMatrix() = default;
  // Zero matrix. Years must be strictly increasing; words unique.
  OccurrenceMatrix(std::vector<int> years, std::vector<std::string> words);
  // Validates shape and counts <= totals.
  OccurrenceMatrix(std::vector<int> years, std::vector<std::string> words,
                   std::vector<std::uint64_t> counts, std::vector<std::uint64_t> totals);

  const std::vector<int>& years() const { return years_; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& totals() const { return totals_; }
  std::size_t word_count() const { return words_.size(); }
  std::size_t year_count() const { return years_.size(); }

  std::optional<std::size_t> year_index(int year) const;
  std::optional<std::size_t> word_index(std::string_view word) const;

  std::uint64_t count(std::size_t word, std::size_t year) const {
    return counts_[word * years_.size() + year];
  }
  std::span<const std::uint64_t> row(std::size_t word) const {
    return {counts_.data() + word * years_.size(), years_.size()};
  }
  std::uint64_t total(std::size_t year) const { return totals_[year]; }

  // Mutable access for counters. Callers keep counts <= totals.
  std::uint64_t* mutable_row(std::size_t word) { return counts_.data() + word * years_.size(); }
  std::uint64_t& mutable_total(std::size_t year) { return totals_[year]; }

  friend bool operator==(const OccurrenceMatrix& a, const OccurrenceMatrix& b) {
    return a.years_ == b.years_ && a.words_ == b.words_ && a.counts_ == b.counts_ &&
           a.totals_ == b.totals_;
  }

 private:
  void build_index();

  std::vector<int> years_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;  // row-major, words x years
  std::vector<std::uint64_t> totals_;
  StringMap<std::size_t> index_;
};

// Element-wise sum of two matrices built from disjoint shards. Throws
// Error(kShapeMismatch) when years or words differ.
OccurrenceMatrix merge(const OccurrenceMatrix& a, const OccurrenceMatrix& b);

// CSV layout: header `word,<year>,...`; one row per word; final row labeled
// `total` carrying the yearly totals. write_matrix gzips deterministically;
// read_matrix accepts gzip or plain text.
std::string write_matrix(const OccurrenceMatrix& m);
OccurrenceMatrix read_matrix(std::string_view bytes);

void save_matrix(const OccurrenceMatrix& m, const std::filesystem::path& path);
OccurrenceMatrix load_matrix(const std::filesystem::path& path);

}  // namespace exvocab
