#include "exvocab/ingest.hpp"

#include <expat.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstring>

#include <nlohmann/json.hpp>

#include "exvocab/embedded_data.hpp"
#include "exvocab/error.hpp"

namespace exvocab {

using nlohmann::json;
using nlohmann::ordered_json;

bool SpanSource::next(Document& doc) {
  if (pos_ >= docs_.size()) return false;
  doc = docs_[pos_++];
  return true;
}

std::string SkipTally::to_json() const {
  ordered_json j;
  j["records"] = records;
  j["emitted"] = emitted;
  j["missing_abstract"] = missing_abstract;
  j["bad_year"] = bad_year;
  j["missing_id"] = missing_id;
  j["malformed_lines"] = malformed_lines;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Country matching

namespace {

bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

}  // namespace

CountryMatcher CountryMatcher::parse(std::string_view table) {
  CountryMatcher m;
  std::size_t line_no = 0;
  auto add = [&m](std::string canonical, std::string_view alias) {
    std::string lowered = to_lower_ascii(trim(alias));
    if (lowered.empty()) return;
    for (const auto& a : m.aliases_) {
      if (a.lowered == lowered) return;
    }
    m.aliases_.push_back({std::move(lowered), std::move(canonical)});
  };
  while (!table.empty()) {
    std::size_t nl = table.find('\n');
    std::string_view line = trim(table.substr(0, nl));
    table = nl == std::string_view::npos ? std::string_view{} : table.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    std::string canonical(trim(line.substr(0, tab)));
    if (canonical.empty()) {
      throw Error(ErrorCode::kParse, "country table line " + std::to_string(line_no) +
                                         ": empty canonical name");
    }
    add(canonical, canonical);
    if (tab != std::string_view::npos) add(canonical, line.substr(tab + 1));
  }
  return m;
}

const CountryMatcher& CountryMatcher::starter() {
  static const CountryMatcher matcher = parse(embedded_file("countries.tsv"));
  return matcher;
}

std::optional<std::string> CountryMatcher::match(std::string_view affiliation) const {
  const std::string text = to_lower_ascii(affiliation);
  std::size_t best_end = 0;
  std::size_t best_len = 0;
  const std::string* best = nullptr;
  for (const auto& alias : aliases_) {
    std::size_t pos = text.rfind(alias.lowered);
    while (pos != std::string::npos) {
      const std::size_t end = pos + alias.lowered.size();
      const bool left_ok = pos == 0 || !is_word_byte(text[pos - 1]);
      const bool right_ok = end == text.size() || !is_word_byte(text[end]);
      if (left_ok && right_ok) {
        // Latest end wins; on equal end the longer alias ("South Korea" over "Korea").
        if (best == nullptr || end > best_end ||
            (end == best_end && alias.lowered.size() > best_len)) {
          best = &alias.canonical;
          best_end = end;
          best_len = alias.lowered.size();
        }
        break;
      }
      if (pos == 0) break;
      pos = text.rfind(alias.lowered, pos - 1);
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

// ---------------------------------------------------------------------------
// MEDLINE XML

namespace {

enum class Capture {
  kNone,
  kPmid,
  kAbstractText,
  kArticleTitle,
  kJournalTitle,
  kPubDateYear,
  kMedlineDate,
  kArticleDateYear,
  kLanguage,
  kAffiliation,
};

// First plausible four-digit year in a free-text date such as
// "1998 Dec-1999 Jan"; the earliest one is the first one in MEDLINE order.
std::optional<int> first_year(std::string_view s) {
  std::optional<int> best;
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    bool digits = true;
    for (std::size_t k = 0; k < 4; ++k) {
      if (!std::isdigit(static_cast<unsigned char>(s[i + k]))) digits = false;
    }
    if (!digits) continue;
    const bool left_ok = i == 0 || !std::isdigit(static_cast<unsigned char>(s[i - 1]));
    const bool right_ok = i + 4 == s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 4]));
    if (!left_ok || !right_ok) continue;
    int year = 0;
    std::from_chars(s.data() + i, s.data() + i + 4, year);
    if (year >= kMinDocumentYear && year <= kMaxDocumentYear && (!best || year < *best)) {
      best = year;
    }
  }
  return best;
}

struct Record {
  std::string pmid;
  std::vector<std::string> abstract_parts;
  std::string title;
  std::string journal;
  std::vector<std::string> years;  // raw year strings from PubDate/ArticleDate
  std::vector<std::string> languages;
  std::string first_affiliation;
  int author_index = -1;
  bool affiliation_done = false;
};

}  // namespace

struct PubmedXmlSource::Impl {
  ByteReader reader;
  XmlOptions options;
  XML_Parser parser = nullptr;
  std::vector<std::string> stack;
  std::deque<Document> ready;
  SkipTally tally;
  bool finished = false;

  bool in_record = false;
  Record record;
  Capture capture = Capture::kNone;
  std::size_t capture_depth = 0;
  std::string buffer;
  std::array<char, 1 << 16> chunk{};

  Impl(std::istream& in, XmlOptions opts) : reader(in), options(opts) {
    parser = XML_ParserCreate(nullptr);
    if (parser == nullptr) throw Error(ErrorCode::kIo, "expat: cannot create parser");
    XML_SetUserData(parser, this);
    XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
    XML_SetCharacterDataHandler(parser, &Impl::on_text);
  }
  ~Impl() { XML_ParserFree(parser); }

  bool at(std::initializer_list<std::string_view> suffix) const {
    if (stack.size() < suffix.size()) return false;
    std::size_t offset = stack.size() - suffix.size();
    std::size_t i = 0;
    for (std::string_view name : suffix) {
      if (stack[offset + i++] != name) return false;
    }
    return true;
  }

  void begin_capture(Capture c) {
    capture = c;
    capture_depth = stack.size();
    buffer.clear();
  }

  static void on_start(void* user, const XML_Char* name, const XML_Char** /*attrs*/) {
    auto* self = static_cast<Impl*>(user);
    self->stack.emplace_back(name);
    self->start(self->stack.back());
  }

  void start(std::string_view name) {
    if (name == "PubmedArticle") {
      in_record = true;
      record = Record{};
      return;
    }
    if (!in_record || capture != Capture::kNone) return;
    if (name == "PMID" && at({"MedlineCitation", "PMID"})) {
      begin_capture(Capture::kPmid);
    } else if (name == "AbstractText" && at({"Article", "Abstract", "AbstractText"})) {
      begin_capture(Capture::kAbstractText);
    } else if (name == "ArticleTitle" && at({"Article", "ArticleTitle"})) {
      begin_capture(Capture::kArticleTitle);
    } else if (name == "Title" && at({"Article", "Journal", "Title"})) {
      begin_capture(Capture::kJournalTitle);
    } else if (name == "Year" && at({"JournalIssue", "PubDate", "Year"})) {
      begin_capture(Capture::kPubDateYear);
    } else if (name == "MedlineDate" && at({"JournalIssue", "PubDate", "MedlineDate"})) {
      begin_capture(Capture::kMedlineDate);
    } else if (name == "Year" && at({"Article", "ArticleDate", "Year"})) {
      begin_capture(Capture::kArticleDateYear);
    } else if (name == "Language" && at({"Article", "Language"})) {
      begin_capture(Capture::kLanguage);
    } else if (name == "Author" && at({"Article", "AuthorList", "Author"})) {
      ++record.author_index;
    } else if (name == "Affiliation" && !record.affiliation_done &&
               ((record.author_index == 0 &&
                 at({"AuthorList", "Author", "AffiliationInfo", "Affiliation"})) ||
                at({"Article", "Affiliation"}))) {
      begin_capture(Capture::kAffiliation);
    }
  }

  static void on_text(void* user, const XML_Char* s, int len) {
    auto* self = static_cast<Impl*>(user);
    if (self->capture != Capture::kNone) self->buffer.append(s, static_cast<std::size_t>(len));
  }

  static void on_end(void* user, const XML_Char* name) {
    auto* self = static_cast<Impl*>(user);
    self->end(name);
    self->stack.pop_back();
  }

  void end(std::string_view name) {
    if (capture != Capture::kNone && stack.size() == capture_depth) {
      std::string value(trim(buffer));
      switch (capture) {
        case Capture::kPmid: record.pmid = std::move(value); break;
        case Capture::kAbstractText:
          if (!value.empty()) record.abstract_parts.push_back(std::move(value));
          break;
        case Capture::kArticleTitle: record.title = std::move(value); break;
        case Capture::kJournalTitle: record.journal = std::move(value); break;
        case Capture::kPubDateYear:
        case Capture::kMedlineDate:
        case Capture::kArticleDateYear: record.years.push_back(std::move(value)); break;
        case Capture::kLanguage: record.languages.push_back(std::move(value)); break;
        case Capture::kAffiliation:
          record.first_affiliation = std::move(value);
          record.affiliation_done = true;
          break;
        case Capture::kNone: break;
      }
      capture = Capture::kNone;
    }
    if (name == "PubmedArticle" && in_record) {
      in_record = false;
      finish_record();
    }
  }

  void finish_record() {
    ++tally.records;
    if (record.pmid.empty()) {
      ++tally.missing_id;
      return;
    }
    if (record.abstract_parts.empty()) {
      ++tally.missing_abstract;
      return;
    }
    std::optional<int> year;
    for (const auto& raw : record.years) {
      if (auto y = first_year(raw); y && (!year || *y < *year)) year = y;
    }
    if (!year) {
      ++tally.bad_year;
      return;
    }
    Document doc;
    doc.id = std::move(record.pmid);
    doc.year = *year;
    doc.title = std::move(record.title);
    for (std::size_t i = 0; i < record.abstract_parts.size(); ++i) {
      if (i > 0) doc.text.push_back(' ');
      doc.text += record.abstract_parts[i];
    }
    if (!record.journal.empty()) doc.journal = std::move(record.journal);
    if (!record.languages.empty()) doc.language = record.languages.front();
    if (options.countries != nullptr && !record.first_affiliation.empty()) {
      doc.country = options.countries->match(record.first_affiliation);
    }
    if (options.field_rules != nullptr) doc.fields = assign_fields(doc.journal.value_or(""), *options.field_rules);
    if (!record.first_affiliation.empty()) doc.extra["affiliation"] = record.first_affiliation;
    ++tally.emitted;
    ready.push_back(std::move(doc));
  }

  void feed(const char* data, std::size_t n, bool final) {
    if (XML_Parse(parser, data, static_cast<int>(n), final ? 1 : 0) == XML_STATUS_ERROR) {
      throw Error(ErrorCode::kParse,
                  "malformed XML at byte " + std::to_string(XML_GetCurrentByteIndex(parser)) +
                      ": " + XML_ErrorString(XML_GetErrorCode(parser)));
    }
  }

  bool pump() {
    if (finished) return false;
    std::size_t n = reader.read(chunk);
    if (n == 0) {
      feed(nullptr, 0, true);
      finished = true;
    } else {
      feed(chunk.data(), n, false);
    }
    return true;
  }
};

PubmedXmlSource::PubmedXmlSource(std::istream& in, XmlOptions options)
    : impl_(std::make_unique<Impl>(in, options)) {}

PubmedXmlSource::~PubmedXmlSource() = default;

bool PubmedXmlSource::next(Document& doc) {
  while (impl_->ready.empty()) {
    if (!impl_->pump()) return false;
  }
  doc = std::move(impl_->ready.front());
  impl_->ready.pop_front();
  return true;
}

const SkipTally& PubmedXmlSource::tally() const { return impl_->tally; }

std::vector<Document> parse_pubmed_xml(std::istream& in, SkipTally* tally, XmlOptions options) {
  PubmedXmlSource source(in, options);
  std::vector<Document> docs;
  Document doc;
  while (source.next(doc)) docs.push_back(std::move(doc));
  if (tally != nullptr) *tally = source.tally();
  return docs;
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

Document document_from_parsed(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object");
  Document doc;
  bool have_id = false, have_year = false, have_text = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") {
      if (value.is_string()) doc.id = value.get<std::string>();
      else if (value.is_number_integer()) doc.id = value.dump();
      else throw Error(ErrorCode::kParse, "id must be a string or integer");
      have_id = !doc.id.empty();
    } else if (key == "year") {
      if (!value.is_number_integer()) throw Error(ErrorCode::kParse, "year must be an integer");
      doc.year = value.get<int>();
      have_year = true;
    } else if (key == "text") {
      if (!value.is_string()) throw Error(ErrorCode::kParse, "text must be a string");
      doc.text = value.get<std::string>();
      have_text = true;
    } else if (key == "title") {
      doc.title = json_scalar_to_string(value);
    } else if (key == "journal") {
      if (!value.is_null()) doc.journal = json_scalar_to_string(value);
    } else if (key == "country") {
      if (!value.is_null()) doc.country = json_scalar_to_string(value);
    } else if (key == "language") {
      if (!value.is_null()) doc.language = json_scalar_to_string(value);
    } else if (key == "fields") {
      if (!value.is_array()) throw Error(ErrorCode::kParse, "fields must be an array");
      for (const auto& f : value) doc.fields.insert(json_scalar_to_string(f));
    } else if (key == "extra") {
      if (!value.is_object()) throw Error(ErrorCode::kParse, "extra must be an object");
      for (const auto& [k, v] : value.items()) doc.extra[k] = json_scalar_to_string(v);
    } else {
      doc.extra[key] = json_scalar_to_string(value);
    }
  }
  if (!have_id) throw Error(ErrorCode::kParse, "missing key 'id'");
  if (!have_year) throw Error(ErrorCode::kParse, "missing key 'year'");
  if (!have_text) throw Error(ErrorCode::kParse, "missing key 'text'");
  if (doc.year < kMinDocumentYear || doc.year > kMaxDocumentYear) {
    throw Error(ErrorCode::kParse, "year " + std::to_string(doc.year) + " outside [1800, 2100]");
  }
  return doc;
}

}  // namespace

Document document_from_json(std::string_view json_line) {
  json j = json::parse(json_line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, "invalid JSON");
  return document_from_parsed(j);
}

std::string to_jsonl_line(const Document& doc) {
  ordered_json j;
  j["id"] = doc.id;
  j["year"] = doc.year;
  j["title"] = doc.title;
  j["text"] = doc.text;
  if (doc.journal) j["journal"] = *doc.journal;
  if (doc.country) j["country"] = *doc.country;
  if (doc.language) j["language"] = *doc.language;
  if (!doc.fields.empty()) j["fields"] = doc.fields;
  if (!doc.extra.empty()) {
    ordered_json extra = ordered_json::object();
    for (const auto& [k, v] : doc.extra) extra[k] = v;
    j["extra"] = std::move(extra);
  }
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

JsonlSource::JsonlSource(std::istream& in, ParseMode mode) : lines_(in), mode_(mode) {}

bool JsonlSource::next(Document& doc) {
  while (lines_.next(line_)) {
    if (trim(line_).empty()) continue;
    ++tally_.records;
    try {
      doc = document_from_json(line_);
    } catch (const Error& e) {
      if (mode_ == ParseMode::kStrict) {
        throw Error(ErrorCode::kParse,
                    "line " + std::to_string(lines_.line_number()) + ": " + e.what());
      }
      ++tally_.malformed_lines;
      continue;
    }
    ++tally_.emitted;
    return true;
  }
  return false;
}

std::vector<Document> parse_jsonl(std::istream& in, ParseMode mode, SkipTally* tally) {
  JsonlSource source(in, mode);
  std::vector<Document> docs;
  Document doc;
  while (source.next(doc)) docs.push_back(std::move(doc));
  if (tally != nullptr) *tally = source.tally();
  return docs;
}

bool is_xml_path(const std::filesystem::path& path) {
  std::string name = path.filename().string();
  auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends_with(".xml") || ends_with(".xml.gz");
}

FileSource::FileSource(const std::filesystem::path& path, ParseMode mode, XmlOptions xml)
    : file_(path) {
  if (is_xml_path(path)) {
    xml_ = std::make_unique<PubmedXmlSource>(file_.stream(), xml);
  } else {
    jsonl_ = std::make_unique<JsonlSource>(file_.stream(), mode);
  }
}

bool FileSource::next(Document& doc) {
  return xml_ ? xml_->next(doc) : jsonl_->next(doc);
}

const SkipTally& FileSource::tally() const { return xml_ ? xml_->tally() : jsonl_->tally(); }

}  // namespace exvocab
