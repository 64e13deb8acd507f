#include "exvocab/vocabulary.hpp"

#include <algorithm>
#include <cmath>

#include "exvocab/error.hpp"
#include "exvocab/ingest.hpp"
#include "exvocab/io.hpp"
#include "exvocab/sharded.hpp"
#include "exvocab/tokenize.hpp"

namespace exvocab {

std::set<std::string> tokenize(std::string_view text) {
  std::set<std::string> out;
  std::string scratch;
  for_each_token(text, scratch, [&](std::string_view t) { out.emplace(t); });
  return out;
}

bool is_eligible_word(std::string_view word) {
  if (word.size() < 4) return false;
  return std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool is_countable_token(std::string_view token) {
  std::size_t n = 0;
  for (char c : token) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80 && ++n >= 2) return true;
  }
  return false;
}

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  index_.reserve(words_.size());
  for (std::uint32_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

std::optional<std::uint32_t> Vocabulary::index(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void VocabularyBuilder::add(const Document& doc) {
  const std::uint64_t serial = ++documents_;
  for_each_token(doc.text, scratch_, [&](std::string_view token) {
    if (options_.eligible_only ? !is_eligible_word(token) : !is_countable_token(token)) return;
    auto it = entries_.find(token);
    if (it == entries_.end()) it = entries_.emplace(std::string(token), Entry{}).first;
    if (it->second.last_doc != serial) {
      it->second.last_doc = serial;
      ++it->second.df;
    }
  });
}

void VocabularyBuilder::merge(const VocabularyBuilder& other) {
  documents_ += other.documents_;
  for (const auto& [word, entry] : other.entries_) {
    auto it = entries_.find(word);
    if (it == entries_.end()) {
      entries_.emplace(word, Entry{entry.df, 0});
    } else {
      it->second.df += entry.df;
    }
  }
  // Serial numbers are shard-local; reset them so later add() calls cannot
  // collide with a merged entry's stale serial.
  for (auto& [word, entry] : entries_) entry.last_doc = 0;
}

Vocabulary VocabularyBuilder::finish() const {
  if (documents_ == 0) throw Error(ErrorCode::kEmptyCorpus, "no documents");
  const double min_count = options_.min_df * static_cast<double>(documents_);
  std::vector<std::string> words;
  for (const auto& [word, entry] : entries_) {
    if (static_cast<double>(entry.df) >= min_count) words.push_back(word);
  }
  return Vocabulary(std::move(words));
}

Vocabulary build_vocabulary(DocumentSource& corpus, VocabularyOptions options, unsigned workers) {
  auto states = run_sharded<VocabularyBuilder>(
      corpus, ShardOptions{workers, 4096}, [&] { return VocabularyBuilder(options); },
      [](VocabularyBuilder& b, const Document& doc) { b.add(doc); });
  for (std::size_t i = 1; i < states.size(); ++i) states[0].merge(states[i]);
  return states[0].finish();
}

Vocabulary build_vocabulary(std::span<const Document> corpus, VocabularyOptions options) {
  SpanSource source(corpus);
  return build_vocabulary(source, options, 1);
}

std::vector<std::string> parse_word_list(std::string_view contents) {
  std::vector<std::string> words;
  while (!contents.empty()) {
    std::size_t nl = contents.find('\n');
    std::string_view line = trim(contents.substr(0, nl));
    contents = nl == std::string_view::npos ? std::string_view{} : contents.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    words.push_back(to_lower_ascii(line));
  }
  return words;
}

}  // namespace exvocab
