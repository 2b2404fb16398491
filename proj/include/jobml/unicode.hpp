#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace jobml::uni {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decode one UTF-8 scalar value starting at pos; advances pos. Malformed
// bytes decode to U+FFFD one byte at a time so counting stays stable.
inline char32_t decode(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + static_cast<std::size_t>(len) > s.size()) {
    ++pos;
    return kReplacement;
  }
  for (int i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + static_cast<std::size_t>(i));
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += static_cast<std::size_t>(len);
  // Reject overlong forms and surrogates.
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return kReplacement;
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000))
    return kReplacement;
  return cp;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Number of Unicode scalar values in a UTF-8 string.
inline std::size_t scalar_count(std::string_view s) {
  std::size_t pos = 0, n = 0;
  while (pos < s.size()) {
    decode(s, pos);
    ++n;
  }
  return n;
}

// Lowercase mapping covering ASCII, Latin-1 Supplement, Latin Extended-A/B and
// Latin Extended Additional; this spans all Vietnamese precomposed letters
// (including horn and dot-below forms). Other scripts pass through unchanged.
inline char32_t fold(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;  // Y with diaeresis
  if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x1A0 || cp == 0x1AF) return cp + 1;  // O-horn, U-horn
  if (cp >= 0x1E00 && cp <= 0x1EFF) return (cp % 2 == 0) ? cp + 1 : cp;
  return cp;
}

inline bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

// Letter classification over the blocks this toolkit expects to meet in job
// postings: Latin (with the full Vietnamese range), combining marks for
// decomposed text, Greek, Cyrillic, CJK, kana, Hangul.
inline bool is_letter(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp < 0x80) return false;
  struct Range {
    char32_t lo, hi;
  };
  static constexpr Range kRanges[] = {
      {0x00C0, 0x00FF},  // Latin-1 letters (x and division signs excluded below)
      {0x0100, 0x024F},  // Latin Extended-A/B
      {0x0300, 0x036F},  // combining diacritical marks
      {0x0370, 0x03FF},  // Greek
      {0x0400, 0x04FF},  // Cyrillic
      {0x1E00, 0x1EFF},  // Latin Extended Additional (Vietnamese)
      {0x3040, 0x30FF},  // Hiragana, Katakana
      {0x4E00, 0x9FFF},  // CJK unified ideographs
      {0xAC00, 0xD7A3},  // Hangul syllables
  };
  if (cp == 0x00D7 || cp == 0x00F7) return false;
  for (const auto& r : kRanges)
    if (cp >= r.lo && cp <= r.hi) return true;
  return false;
}

// Case-fold and collapse whitespace runs to single spaces, trimming the ends.
// Used for catalog title matching, not for model text cleaning.
inline std::string fold_collapse(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  bool pending_space = false;
  while (pos < s.size()) {
    const char32_t cp = decode(s, pos);
    const bool ws = (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == 0xA0);
    if (ws) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append(out, fold(cp));
  }
  return out;
}

}  // namespace jobml::uni
