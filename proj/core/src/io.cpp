#include "exvocab/io.hpp"

#include <zlib.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cstring>
#include <sstream>

#include "exvocab/error.hpp"

namespace exvocab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kParse: return "PARSE_ERROR";
    case ErrorCode::kIo: return "IO_ERROR";
    case ErrorCode::kEmptyCorpus: return "EMPTY_CORPUS";
    case ErrorCode::kYearOutOfRange: return "YEAR_OUT_OF_RANGE";
    case ErrorCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::kMissingTotals: return "MISSING_TOTALS";
    case ErrorCode::kNonIntegerCell: return "NON_INTEGER_CELL";
    case ErrorCode::kWordUnknown: return "WORD_UNKNOWN";
    case ErrorCode::kMissingYear: return "MISSING_YEAR";
    case ErrorCode::kSetsOverlap: return "SETS_OVERLAP";
    case ErrorCode::kPoolExhausted: return "POOL_EXHAUSTED";
    case ErrorCode::kSizeCap: return "SIZE_CAP";
    case ErrorCode::kInvalidPattern: return "INVALID_PATTERN";
  }
  return "UNKNOWN";
}

struct ByteReader::Inflater {
  z_stream zs{};
  std::array<char, 1 << 16> in_buf{};
  bool stream_end = false;

  Inflater() {
    // 16 + MAX_WBITS: gzip wrapper only.
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
      throw Error(ErrorCode::kIo, "zlib: inflateInit2 failed");
    }
  }
  ~Inflater() { inflateEnd(&zs); }
};

ByteReader::ByteReader(std::istream& in) : in_(in) {
  char magic[2];
  in_.read(magic, 2);
  pending_.assign(magic, static_cast<std::size_t>(in_.gcount()));
  compressed_ = pending_.size() == 2 && static_cast<unsigned char>(magic[0]) == 0x1f &&
                static_cast<unsigned char>(magic[1]) == 0x8b;
  if (compressed_) inflater_ = std::make_unique<Inflater>();
}

ByteReader::~ByteReader() = default;

std::size_t ByteReader::read_raw(char* out, std::size_t n) {
  std::size_t got = 0;
  while (pending_pos_ < pending_.size() && got < n) out[got++] = pending_[pending_pos_++];
  if (got < n && in_) {
    in_.read(out + got, static_cast<std::streamsize>(n - got));
    got += static_cast<std::size_t>(in_.gcount());
  }
  return got;
}

std::size_t ByteReader::read(std::span<char> out) {
  if (out.empty() || eof_) return 0;
  if (!compressed_) {
    std::size_t got = read_raw(out.data(), out.size());
    if (got == 0) eof_ = true;
    return got;
  }
  auto& zs = inflater_->zs;
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  while (zs.avail_out > 0) {
    if (inflater_->stream_end) {
      // Concatenated gzip members (as produced by `cat a.gz b.gz`).
      if (zs.avail_in == 0) {
        std::size_t n = read_raw(inflater_->in_buf.data(), inflater_->in_buf.size());
        if (n == 0) break;
        zs.next_in = reinterpret_cast<Bytef*>(inflater_->in_buf.data());
        zs.avail_in = static_cast<uInt>(n);
      }
      inflateReset(&zs);
      inflater_->stream_end = false;
    }
    if (zs.avail_in == 0) {
      std::size_t n = read_raw(inflater_->in_buf.data(), inflater_->in_buf.size());
      if (n == 0) {
        throw Error(ErrorCode::kIo, "gzip: truncated stream");
      }
      zs.next_in = reinterpret_cast<Bytef*>(inflater_->in_buf.data());
      zs.avail_in = static_cast<uInt>(n);
    }
    int rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_STREAM_END) {
      inflater_->stream_end = true;
    } else if (rc != Z_OK && rc != Z_BUF_ERROR) {
      throw Error(ErrorCode::kIo, std::string("gzip: ") + (zs.msg ? zs.msg : "inflate failed"));
    }
  }
  std::size_t produced = out.size() - zs.avail_out;
  if (produced == 0) eof_ = true;
  return produced;
}

bool LineReader::next(std::string& line) {
  line.clear();
  if (done_) return false;
  bool any = false;
  while (true) {
    if (pos_ == end_) {
      end_ = bytes_.read(buffer_);
      pos_ = 0;
      if (end_ == 0) {
        done_ = true;
        if (!any) return false;
        break;
      }
    }
    any = true;
    const char* begin = buffer_.data() + pos_;
    const void* nl = std::memchr(begin, '\n', end_ - pos_);
    if (nl != nullptr) {
      std::size_t len = static_cast<const char*>(nl) - begin;
      line.append(begin, len);
      pos_ += len + 1;
      break;
    }
    line.append(begin, end_ - pos_);
    pos_ = end_;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_number_;
  return true;
}

InputFile::InputFile(const std::filesystem::path& path) : stream_(path, std::ios::binary) {
  if (!stream_) throw Error(ErrorCode::kIo, "cannot open " + path.string());
}

std::string gzip_compress(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kIo, "zlib: deflateInit2 failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::kIo, "zlib: deflate failed");
  out.resize(zs.total_out);
  return out;
}

std::string gunzip_if_needed(std::string_view data) {
  std::istringstream in{std::string(data)};
  ByteReader reader(in);
  std::string out;
  std::array<char, 1 << 16> buf{};
  while (std::size_t n = reader.read(buf)) out.append(buf.data(), n);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace exvocab
