#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace exvocab {

namespace detail {

// Word characters follow the \w convention: ASCII letters, digits and '_',
// plus non-ASCII code points outside the common punctuation and symbol blocks.
constexpr bool is_word_code_point(std::uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') ||
           cp == '_';
  }
  if (cp <= 0xBF) {
    // Latin-1 punctuation, except the letters/digits that live there.
    return cp == 0xAA || cp == 0xB2 || cp == 0xB3 || cp == 0xB5 || cp == 0xB9 || cp == 0xBA ||
           (cp >= 0xBC && cp <= 0xBE);
  }
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
  if (cp >= 0x20A0 && cp <= 0x20FF) return false;  // currency, combining symbols
  if (cp >= 0x2190 && cp <= 0x2BFF) return false;  // arrows .. misc symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xE000 && cp <= 0xF8FF) return false;  // private use
  if (cp >= 0xFE10 && cp <= 0xFE6F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp >= 0xFF1A && cp <= 0xFF20) return false;
  if (cp >= 0xFF3B && cp <= 0xFF40) return false;
  if (cp >= 0xFF5B && cp <= 0xFF65) return false;
  if (cp >= 0xFFF0 && cp <= 0xFFFF) return false;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;  // emoji and pictographs
  return true;
}

// Decodes one UTF-8 sequence starting at text[i]; advances i. Invalid bytes
// decode to U+FFFD and consume one byte.
inline std::uint32_t decode_utf8(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + static_cast<std::size_t>(extra) >= text.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += static_cast<std::size_t>(extra) + 1;
  return cp;
}

}  // namespace detail

// Invokes fn(std::string_view token) for every maximal run of word characters,
// ASCII-lowercased. Duplicates are reported each time they occur; `scratch`
// is reused between calls to avoid allocation on hot paths.
template <typename Fn>
void for_each_token(std::string_view text, std::string& scratch, Fn&& fn) {
  scratch.clear();
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const std::uint32_t cp = detail::decode_utf8(text, i);
    if (detail::is_word_code_point(cp)) {
      if (cp < 0x80) {
        char c = static_cast<char>(cp);
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        scratch.push_back(c);
      } else {
        scratch.append(text.substr(start, i - start));
      }
    } else if (!scratch.empty()) {
      fn(std::string_view(scratch));
      scratch.clear();
    }
  }
  if (!scratch.empty()) {
    fn(std::string_view(scratch));
    scratch.clear();
  }
}

// The binary token set of a text: lowercased, duplicates collapsed.
std::set<std::string> tokenize(std::string_view text);

// Analysis vocabulary: at least four letters, only a-z.
bool is_eligible_word(std::string_view word);

// Tokens kept in the full (unfiltered) vocabulary: at least two code points.
bool is_countable_token(std::string_view token);

}  // namespace exvocab
