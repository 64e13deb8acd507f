#include "exvocab/matrix.hpp"

#include <charconv>

#include "exvocab/error.hpp"
#include "exvocab/io.hpp"

namespace exvocab {

namespace {

void check_years(const std::vector<int>& years) {
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] <= years[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "matrix years must be strictly increasing");
    }
  }
}

}  // namespace

OccurrenceMatrix::OccurrenceMatrix(std::vector<int> years, std::vector<std::string> words)
    : years_(std::move(years)),
      words_(std::move(words)),
      counts_(words_.size() * years_.size(), 0),
      totals_(years_.size(), 0) {
  check_years(years_);
  build_index();
}

OccurrenceMatrix::OccurrenceMatrix(std::vector<int> years, std::vector<std::string> words,
                                   std::vector<std::uint64_t> counts,
                                   std::vector<std::uint64_t> totals)
    : years_(std::move(years)),
      words_(std::move(words)),
      counts_(std::move(counts)),
      totals_(std::move(totals)) {
  check_years(years_);
  if (totals_.size() != years_.size() || counts_.size() != words_.size() * years_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "matrix shape does not match years x words");
  }
  for (std::size_t w = 0; w < words_.size(); ++w) {
    for (std::size_t y = 0; y < years_.size(); ++y) {
      if (count(w, y) > totals_[y]) {
        throw Error(ErrorCode::kShapeMismatch,
                    "count for '" + words_[w] + "' in " + std::to_string(years_[y]) +
                        " exceeds the year total");
      }
    }
  }
  build_index();
}

void OccurrenceMatrix::build_index() {
  index_.clear();
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate matrix word '" + words_[i] + "'");
    }
  }
}

std::optional<std::size_t> OccurrenceMatrix::year_index(int year) const {
  for (std::size_t i = 0; i < years_.size(); ++i) {
    if (years_[i] == year) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> OccurrenceMatrix::word_index(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

OccurrenceMatrix merge(const OccurrenceMatrix& a, const OccurrenceMatrix& b) {
  if (a.years() != b.years()) throw Error(ErrorCode::kShapeMismatch, "merge: year ranges differ");
  if (a.words() != b.words()) throw Error(ErrorCode::kShapeMismatch, "merge: vocabularies differ");
  OccurrenceMatrix out = a;
  for (std::size_t w = 0; w < a.word_count(); ++w) {
    std::uint64_t* row = out.mutable_row(w);
    auto other = b.row(w);
    for (std::size_t y = 0; y < a.year_count(); ++y) row[y] += other[y];
  }
  for (std::size_t y = 0; y < a.year_count(); ++y) out.mutable_total(y) += b.total(y);
  return out;
}

std::string write_matrix(const OccurrenceMatrix& m) {
  std::string csv;
  csv.reserve(m.word_count() * (12 + 6 * m.year_count()) + 64);
  csv += "word";
  for (int y : m.years()) {
    csv.push_back(',');
    csv += std::to_string(y);
  }
  csv.push_back('\n');
  for (std::size_t w = 0; w < m.word_count(); ++w) {
    csv += csv_escape(m.words()[w]);
    for (std::uint64_t c : m.row(w)) {
      csv.push_back(',');
      csv += std::to_string(c);
    }
    csv.push_back('\n');
  }
  csv += "total";
  for (std::uint64_t t : m.totals()) {
    csv.push_back(',');
    csv += std::to_string(t);
  }
  csv.push_back('\n');
  return gzip_compress(csv);
}

namespace {

std::uint64_t parse_cell(std::string_view cell, std::size_t line_no) {
  std::uint64_t v = 0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    throw Error(ErrorCode::kNonIntegerCell, "matrix line " + std::to_string(line_no) +
                                                ": non-integer cell '" + std::string(cell) + "'");
  }
  return v;
}

}  // namespace

OccurrenceMatrix read_matrix(std::string_view bytes) {
  const std::string text = gunzip_if_needed(bytes);
  std::string_view rest = text;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (rest.empty()) return false;
    std::size_t nl = rest.find('\n');
    line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(ErrorCode::kShapeMismatch, "matrix: empty input");
  std::vector<int> years;
  {
    auto header = split_csv_line(line);
    for (std::size_t i = 1; i < header.size(); ++i) {
      int y = 0;
      std::string_view cell = trim(header[i]);
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), y);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::kShapeMismatch, "matrix header: '" + header[i] + "' is not a year");
      }
      years.push_back(y);
    }
  }
  if (years.empty()) throw Error(ErrorCode::kShapeMismatch, "matrix header has no year columns");

  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> last_row;
  std::string last_label;
  bool have_last = false;
  std::vector<std::uint64_t> row(years.size());
  while (next_line(line)) {
    if (line.empty()) continue;
    if (have_last) {
      words.push_back(std::move(last_label));
      counts.insert(counts.end(), last_row.begin(), last_row.end());
    }
    std::string label;
    std::size_t comma = line.find(',');
    if (!line.empty() && line.front() == '"') {
      auto cells = split_csv_line(line);
      label = cells.front();
      std::size_t consumed = 0;
      // Re-locate the first unquoted comma after the quoted label.
      bool quoted = false;
      for (; consumed < line.size(); ++consumed) {
        if (line[consumed] == '"') quoted = !quoted;
        else if (line[consumed] == ',' && !quoted) break;
      }
      comma = consumed < line.size() ? consumed : std::string_view::npos;
    } else {
      label = std::string(line.substr(0, comma));
    }
    std::size_t col = 0;
    std::string_view cells = comma == std::string_view::npos ? std::string_view{}
                                                             : line.substr(comma + 1);
    while (comma != std::string_view::npos) {
      std::size_t next = cells.find(',');
      std::string_view cell = cells.substr(0, next);
      if (col >= years.size()) {
        throw Error(ErrorCode::kShapeMismatch,
                    "matrix line " + std::to_string(line_no) + ": too many columns");
      }
      row[col++] = parse_cell(cell, line_no);
      if (next == std::string_view::npos) break;
      cells = cells.substr(next + 1);
    }
    if (col != years.size()) {
      throw Error(ErrorCode::kShapeMismatch, "matrix line " + std::to_string(line_no) +
                                                 ": expected " + std::to_string(years.size()) +
                                                 " counts, found " + std::to_string(col));
    }
    last_label = std::move(label);
    last_row = row;
    have_last = true;
  }
  if (!have_last || last_label != "total") {
    // A trailing word row labeled anything else means the totals row is absent.
    throw Error(ErrorCode::kMissingTotals, "matrix: final row must be labeled 'total'");
  }
  return OccurrenceMatrix(std::move(years), std::move(words), std::move(counts),
                          std::move(last_row));
}

void save_matrix(const OccurrenceMatrix& m, const std::filesystem::path& path) {
  write_file(path, write_matrix(m));
}

OccurrenceMatrix load_matrix(const std::filesystem::path& path) {
  return read_matrix(read_file(path));
}

}  // namespace exvocab
