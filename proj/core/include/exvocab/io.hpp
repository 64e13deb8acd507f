#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace exvocab {

// Reads bytes from an istream, transparently inflating gzip input. Gzip is
// detected from the two magic bytes 1f 8b, so callers never need to know
// whether a file is compressed.
class ByteReader {
 public:
  explicit ByteReader(std::istream& in);
  ~ByteReader();
  ByteReader(const ByteReader&) = delete;
  ByteReader& operator=(const ByteReader&) = delete;

  // Fills up to out.size() bytes; returns 0 at end of stream.
  std::size_t read(std::span<char> out);

  bool compressed() const noexcept { return compressed_; }

 private:
  std::size_t read_raw(char* out, std::size_t n);

  std::istream& in_;
  bool compressed_ = false;
  bool eof_ = false;
  std::string pending_;  // bytes consumed while sniffing the magic
  std::size_t pending_pos_ = 0;
  struct Inflater;
  std::unique_ptr<Inflater> inflater_;
};

// Line-oriented reader on top of ByteReader. Strips a trailing '\r'.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : bytes_(in) {}

  bool next(std::string& line);
  std::size_t line_number() const noexcept { return line_number_; }

 private:
  ByteReader bytes_;
  std::vector<char> buffer_ = std::vector<char>(1 << 16);
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::size_t line_number_ = 0;
  bool done_ = false;
};

// An input file opened for ByteReader/LineReader use.
class InputFile {
 public:
  explicit InputFile(const std::filesystem::path& path);
  std::istream& stream() { return stream_; }

 private:
  std::ifstream stream_;
};

// Deterministic gzip (mtime 0, no file name) so artifacts are byte-stable.
std::string gzip_compress(std::string_view data);
std::string gunzip_if_needed(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

// Shortest round-trip decimal representation.
std::string format_double(double value);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace exvocab
