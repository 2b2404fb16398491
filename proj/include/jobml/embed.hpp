#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "jobml/error.hpp"
#include "jobml/rng.hpp"
#include "jobml/tensor.hpp"
#include "jobml/textpipe.hpp"

namespace jobml {

template <typename S>
struct PretrainedVectors {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<S>> vectors;
  std::string source_name;
};

namespace detail {

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (start < line.size()) {
    while (start < line.size() && line[start] == ' ') ++start;
    std::size_t end = start;
    while (end < line.size() && line[end] != ' ') ++end;
    if (end > start) fields.push_back(line.substr(start, end - start));
    start = end;
  }
  return fields;
}

inline bool is_positive_integer(std::string_view s) {
  if (s.empty()) return false;
  for (const char c : s)
    if (c < '0' || c > '9') return false;
  return s != "0";
}

}  // namespace detail

// Word2vec-style text format: optional `count dim` header line, then one
// `token v1 ... vd` per line. The header is recognized as a first line of
// exactly two positive integers; otherwise dim comes from the first data row.
template <typename S = float>
PretrainedVectors<S> load_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("vectors: cannot open " + path);
  PretrainedVectors<S> out;
  out.source_name = path;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = detail::split_spaces(line);
    if (first) {
      first = false;
      if (fields.size() == 2 && detail::is_positive_integer(fields[0]) &&
          detail::is_positive_integer(fields[1])) {
        out.dim = std::stoull(std::string(fields[1]));
        continue;
      }
    }
    if (fields.size() < 2)
      throw ValidationError("vectors: " + path + ":" + std::to_string(line_no) +
                            ": expected `token v1 ... vd`");
    if (out.dim == 0) out.dim = fields.size() - 1;
    if (fields.size() - 1 != out.dim)
      throw ValidationError("vectors: " + path + ":" + std::to_string(line_no) + ": row has " +
                            std::to_string(fields.size() - 1) + " components, expected " +
                            std::to_string(out.dim));
    std::vector<S> vec(out.dim);
    for (std::size_t i = 0; i < out.dim; ++i) {
      const std::string text(fields[i + 1]);
      try {
        std::size_t used = 0;
        vec[i] = static_cast<S>(std::stod(text, &used));
        if (used != text.size()) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        throw ValidationError("vectors: " + path + ":" + std::to_string(line_no) +
                              ": non-numeric component \"" + text + "\"");
      }
    }
    out.vectors[std::string(fields[0])] = std::move(vec);
  }
  if (out.dim == 0) throw ValidationError("vectors: " + path + " has no rows");
  return out;
}

template <typename S>
struct EmbeddingTable {
  Tensor<S> matrix;  // |vocab| x dim
  std::size_t dim = 0;
  bool trainable = true;
  std::size_t oov_count = 0;
};

// Tokens found in the pretrained map copy their vector; everything else
// (including UNK, excluding PAD) draws uniform [-0.25, 0.25] from `seed`.
// PAD's row stays zero.
template <typename S>
EmbeddingTable<S> build_embedding_matrix(const Vocabulary& vocab,
                                         const PretrainedVectors<S>& pretrained,
                                         std::uint64_t seed) {
  if (vocab.size() == 0) throw ValidationError("embedding: empty vocabulary");
  if (pretrained.dim == 0) throw ValidationError("embedding: pretrained dim is zero");
  EmbeddingTable<S> table;
  table.dim = pretrained.dim;
  table.matrix = Tensor<S>::zeros({vocab.size(), pretrained.dim});
  Rng rng(seed);
  for (std::size_t row = 1; row < vocab.size(); ++row) {
    const auto it = pretrained.vectors.find(vocab.token(row));
    if (it != pretrained.vectors.end()) {
      for (std::size_t j = 0; j < table.dim; ++j) table.matrix.at(row, j) = it->second[j];
    } else {
      ++table.oov_count;
      for (std::size_t j = 0; j < table.dim; ++j)
        table.matrix.at(row, j) = static_cast<S>(rng.uniform(-0.25, 0.25));
    }
  }
  return table;
}

}  // namespace jobml
