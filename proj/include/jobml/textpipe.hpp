#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jobml/error.hpp"
#include "jobml/unicode.hpp"

namespace jobml {

// Lowercase the text and keep only letters (diacritics included), digits,
// underscore and single spaces; everything else becomes a space, runs of
// spaces collapse, ends are trimmed.
inline std::string clean_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t pos = 0;
  bool pending_space = false;
  while (pos < raw.size()) {
    const char32_t cp = uni::fold(uni::decode(raw, pos));
    if (uni::is_letter(cp) || uni::is_digit(cp) || cp == U'_') {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      uni::append(out, cp);
    } else {
      pending_space = true;
    }
  }
  return out;
}

inline std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < cleaned.size()) {
    const std::size_t space = cleaned.find(' ', start);
    const std::size_t end = space == std::string_view::npos ? cleaned.size() : space;
    if (end > start) tokens.emplace_back(cleaned.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;

  Vocabulary() : Vocabulary(1) {}
  explicit Vocabulary(std::size_t min_freq) : min_freq_(min_freq) {
    index_to_token_ = {"<pad>", "<unk>"};
    token_to_index_ = {{"<pad>", kPad}, {"<unk>", kUnk}};
  }

  std::size_t size() const { return index_to_token_.size(); }
  std::size_t min_freq() const { return min_freq_; }
  const std::vector<std::string>& tokens() const { return index_to_token_; }
  const std::string& token(std::size_t index) const { return index_to_token_.at(index); }

  std::size_t lookup(std::string_view token) const {
    const auto it = token_to_index_.find(std::string(token));
    return it == token_to_index_.end() ? kUnk : it->second;
  }
  bool contains(std::string_view token) const {
    return token_to_index_.count(std::string(token)) != 0;
  }

  // Appends with the next dense index; build_vocab and load_vocab drive this.
  void add(const std::string& token) {
    if (token_to_index_.count(token))
      throw ValidationError("vocab: duplicate token \"" + token + "\"");
    token_to_index_.emplace(token, index_to_token_.size());
    index_to_token_.push_back(token);
  }

  bool operator==(const Vocabulary& other) const {
    return min_freq_ == other.min_freq_ && index_to_token_ == other.index_to_token_;
  }

 private:
  std::size_t min_freq_;
  std::vector<std::string> index_to_token_;
  std::unordered_map<std::string, std::size_t> token_to_index_;
};

// Indices 2.. are assigned by descending frequency, ties broken
// lexicographically. Tokens below min_freq are dropped.
inline Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpora,
                              std::size_t min_freq) {
  if (min_freq < 1) throw ValidationError("vocab: min_freq must be >= 1");
  if (corpora.empty()) throw ValidationError("vocab: empty corpora");
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& doc : corpora)
    for (const auto& token : doc) ++freq[token];
  std::vector<std::pair<std::string, std::size_t>> entries;
  entries.reserve(freq.size());
  for (auto& [token, count] : freq)
    if (count >= min_freq) entries.emplace_back(token, count);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab(min_freq);
  for (const auto& [token, count] : entries) vocab.add(token);
  return vocab;
}

struct EncodedSequence {
  std::vector<std::size_t> indices;  // length exactly max_len
  std::size_t true_length = 0;       // tokens before padding
};

// OOV tokens map to UNK; long sequences keep their first max_len tokens;
// short ones are right-padded with PAD.
inline EncodedSequence encode(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                              std::size_t max_len) {
  if (max_len < 1) throw ValidationError("encode: max_len must be >= 1");
  EncodedSequence seq;
  seq.true_length = std::min(tokens.size(), max_len);
  seq.indices.assign(max_len, Vocabulary::kPad);
  for (std::size_t i = 0; i < seq.true_length; ++i) seq.indices[i] = vocab.lookup(tokens[i]);
  return seq;
}

inline std::vector<std::string> decode(const EncodedSequence& seq, const Vocabulary& vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(seq.true_length);
  for (std::size_t i = 0; i < seq.true_length; ++i) tokens.push_back(vocab.token(seq.indices[i]));
  return tokens;
}

// Text format: header `min_freq<TAB>size`, then one `token<TAB>index` per line.
inline void save_vocab(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("vocab: cannot write " + path);
  out << vocab.min_freq() << '\t' << vocab.size() << '\n';
  for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.token(i) << '\t' << i << '\n';
  if (!out) throw RuntimeError("vocab: write failed for " + path);
}

inline Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("vocab: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("vocab: " + path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t min_freq = 0, size = 0;
  {
    std::istringstream header(line);
    char tab = 0;
    if (!(header >> min_freq) || !header.get(tab) || tab != '\t' || !(header >> size) || min_freq < 1)
      throw ValidationError("vocab: " + path + ":1: bad header, expected `min_freq<TAB>size`");
  }
  Vocabulary vocab(min_freq);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ValidationError("vocab: " + path + ":" + std::to_string(line_no) +
                            ": expected `token<TAB>index`");
    const std::string token = line.substr(0, tab);
    std::size_t index = 0;
    try {
      index = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ValidationError("vocab: " + path + ":" + std::to_string(line_no) + ": bad index");
    }
    if (index < 2) {
      // Reserved rows are listed for readability; check they match.
      const std::string expected = index == Vocabulary::kPad ? "<pad>" : "<unk>";
      if (token != expected)
        throw ValidationError("vocab: " + path + ":" + std::to_string(line_no) +
                              ": index " + std::to_string(index) + " must be " + expected);
      continue;
    }
    if (index != vocab.size())
      throw ValidationError("vocab: " + path + ":" + std::to_string(line_no) +
                            ": index " + std::to_string(index) + " out of order, expected " +
                            std::to_string(vocab.size()));
    vocab.add(token);
  }
  if (vocab.size() != size)
    throw ValidationError("vocab: " + path + ": header says " + std::to_string(size) +
                          " tokens but file has " + std::to_string(vocab.size()));
  return vocab;
}

}  // namespace jobml
