#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exvocab/document.hpp"
#include "exvocab/io.hpp"

namespace exvocab {

// Pull-style stream of documents. Every corpus pass in the library consumes
// one of these, so file-backed and in-memory corpora are interchangeable.
class DocumentSource {
 public:
  virtual ~DocumentSource() = default;
  virtual bool next(Document& doc) = 0;
};

class SpanSource final : public DocumentSource {
 public:
  explicit SpanSource(std::span<const Document> docs) : docs_(docs) {}
  bool next(Document& doc) override;

 private:
  std::span<const Document> docs_;
  std::size_t pos_ = 0;
};

// Counters for records that were read but did not produce a Document.
struct SkipTally {
  std::uint64_t records = 0;
  std::uint64_t emitted = 0;
  std::uint64_t missing_abstract = 0;
  std::uint64_t bad_year = 0;
  std::uint64_t missing_id = 0;
  std::uint64_t malformed_lines = 0;

  std::string to_json() const;
};

// Maps free-text affiliation strings onto canonical country names using an
// alias table. The match ending closest to the end of the string wins, since
// affiliations conventionally end with the country.
class CountryMatcher {
 public:
  // Table file: `canonical<TAB>alias` per line, `#` comments. The canonical
  // name is always an alias of itself.
  static CountryMatcher parse(std::string_view table);
  static const CountryMatcher& starter();

  std::optional<std::string> match(std::string_view affiliation) const;
  std::size_t alias_count() const { return aliases_.size(); }

 private:
  struct Alias {
    std::string lowered;
    std::string canonical;
  };
  std::vector<Alias> aliases_;
};

struct XmlOptions {
  const CountryMatcher* countries = nullptr;   // null: country left absent
  const std::vector<FieldRule>* field_rules = nullptr;
};

// Streams PubmedArticle records out of a MEDLINE citation set. Input may be
// gzip-compressed. Malformed XML throws Error(kParse) naming the byte offset
// in the decompressed stream.
class PubmedXmlSource final : public DocumentSource {
 public:
  PubmedXmlSource(std::istream& in, XmlOptions options = {});
  ~PubmedXmlSource() override;

  bool next(Document& doc) override;
  const SkipTally& tally() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<Document> parse_pubmed_xml(std::istream& in, SkipTally* tally = nullptr,
                                       XmlOptions options = {});

enum class ParseMode { kStrict, kLenient };

// One JSON object per line: id, year, text required; title, journal,
// country, language, fields, extra optional. Unknown keys land in extra.
class JsonlSource final : public DocumentSource {
 public:
  explicit JsonlSource(std::istream& in, ParseMode mode = ParseMode::kStrict);

  bool next(Document& doc) override;
  const SkipTally& tally() const { return tally_; }

 private:
  LineReader lines_;
  ParseMode mode_;
  SkipTally tally_;
  std::string line_;
};

std::vector<Document> parse_jsonl(std::istream& in, ParseMode mode = ParseMode::kStrict,
                                  SkipTally* tally = nullptr);

// Canonical serialization: fixed key order, optional keys omitted when absent.
std::string to_jsonl_line(const Document& doc);
Document document_from_json(std::string_view json_line);

// Opens a file by extension (.xml / .xml.gz / .jsonl / .jsonl.gz) and owns the
// underlying stream for the lifetime of the source.
class FileSource final : public DocumentSource {
 public:
  FileSource(const std::filesystem::path& path, ParseMode mode, XmlOptions xml = {});
  bool next(Document& doc) override;
  const SkipTally& tally() const;

 private:
  InputFile file_;
  std::unique_ptr<PubmedXmlSource> xml_;
  std::unique_ptr<JsonlSource> jsonl_;
};

bool is_xml_path(const std::filesystem::path& path);

}  // namespace exvocab
