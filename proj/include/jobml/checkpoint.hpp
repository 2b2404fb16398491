#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "jobml/corpus.hpp"
#include "jobml/error.hpp"
#include "jobml/model.hpp"
#include "jobml/textpipe.hpp"

namespace jobml {

inline nlohmann::json config_to_json(const ModelConfig& c) {
  return nlohmann::json{{"vocab_size", c.vocab_size},
                        {"embed_dim", c.embed_dim},
                        {"max_len", c.max_len},
                        {"gru_units", c.gru_units},
                        {"lstm_units", c.lstm_units},
                        {"conv_filters", c.conv_filters},
                        {"conv_kernel_widths", c.conv_kernel_widths},
                        {"num_labels", c.num_labels},
                        {"threshold", c.threshold},
                        {"batch_size", c.batch_size},
                        {"epochs", c.epochs},
                        {"seed", c.seed}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.vocab_size = j.at("vocab_size").get<std::size_t>();
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.max_len = j.at("max_len").get<std::size_t>();
    c.gru_units = j.at("gru_units").get<std::size_t>();
    c.lstm_units = j.at("lstm_units").get<std::size_t>();
    c.conv_filters = j.at("conv_filters").get<std::size_t>();
    c.conv_kernel_widths = j.at("conv_kernel_widths").get<std::vector<std::size_t>>();
    c.num_labels = j.at("num_labels").get<std::size_t>();
    c.threshold = j.at("threshold").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace detail {

inline constexpr char kCheckpointMagic[8] = {'J', 'M', 'L', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}
inline std::uint64_t get_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

inline void put_scalar(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_scalar(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
inline void get_scalar(const std::string& in, std::size_t at, float& v) {
  v = std::bit_cast<float>(get_u32(in, at));
}
inline void get_scalar(const std::string& in, std::size_t at, double& v) {
  v = std::bit_cast<double>(get_u64(in, at));
}

template <typename S>
constexpr const char* scalar_tag() {
  if constexpr (std::is_same_v<S, float>) return "f32";
  else return "f64";
}

}  // namespace detail

template <typename S>
struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  LabelCatalog catalog;
  ModelParams<S> params;
};

// Layout: 8-byte magic, u32 format version, u64 header length, JSON header
// (config, catalog, vocabulary, tensor manifest), then raw little-endian
// scalar payload. Scalars are written bit-for-bit, so a load reproduces
// forward outputs exactly.
template <typename S>
void save_checkpoint(const ModelParams<S>& params, const ModelConfig& config,
                     const Vocabulary& vocab, const LabelCatalog& catalog,
                     const std::string& path) {
  audit_param_shapes(params, config);
  if (catalog.size() != config.num_labels)
    throw ValidationError("checkpoint: catalog has " + std::to_string(catalog.size()) +
                          " titles but config expects " + std::to_string(config.num_labels));
  if (vocab.size() != config.vocab_size)
    throw ValidationError("checkpoint: vocabulary has " + std::to_string(vocab.size()) +
                          " tokens but config expects " + std::to_string(config.vocab_size));

  std::string payload;
  nlohmann::json manifest = nlohmann::json::array();
  params.for_each([&](const char* name, const Tensor<S>& t) {
    manifest.push_back({{"name", name},
                        {"shape", t.shape()},
                        {"offset", payload.size()},
                        {"count", t.numel()}});
    for (const S v : t.values()) detail::put_scalar(payload, v);
  });

  nlohmann::json aliases = nlohmann::json::object();
  for (const auto& [alias, index] : catalog.aliases()) aliases[alias] = index;
  const nlohmann::json header{{"format", "jobml-checkpoint"},
                              {"version", detail::kCheckpointVersion},
                              {"scalar", detail::scalar_tag<S>()},
                              {"config", config_to_json(config)},
                              {"catalog", {{"titles", catalog.titles()}, {"aliases", aliases}}},
                              {"vocab", {{"min_freq", vocab.min_freq()}, {"tokens", vocab.tokens()}}},
                              {"tensors", manifest}};
  const std::string header_text = header.dump();

  std::string blob;
  blob.reserve(8 + 4 + 8 + header_text.size() + payload.size());
  blob.append(detail::kCheckpointMagic, 8);
  detail::put_u32(blob, detail::kCheckpointVersion);
  detail::put_u64(blob, header_text.size());
  blob += header_text;
  blob += payload;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("checkpoint: cannot write " + path);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw RuntimeError("checkpoint: write failed for " + path);
}

template <typename S>
Checkpoint<S> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("checkpoint: cannot open " + path);
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (blob.size() < 8 + 4 + 8) throw RuntimeError("checkpoint: " + path + " is truncated");
  if (blob.compare(0, 8, detail::kCheckpointMagic, 8) != 0)
    throw ValidationError("checkpoint: " + path + " is not a checkpoint file");
  const std::uint32_t version = detail::get_u32(blob, 8);
  if (version != detail::kCheckpointVersion)
    throw ValidationError("checkpoint: " + path + " has format version " +
                          std::to_string(version) + ", this build reads version " +
                          std::to_string(detail::kCheckpointVersion));
  const std::uint64_t header_len = detail::get_u64(blob, 12);
  const std::size_t payload_at = 20 + header_len;
  if (blob.size() < payload_at) throw RuntimeError("checkpoint: " + path + " is truncated");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(20, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeError("checkpoint: " + path + " has a corrupt header: " + e.what());
  }
  try {
    if (header.at("format").get<std::string>() != "jobml-checkpoint")
      throw ValidationError("checkpoint: " + path + " has an unknown format tag");
    if (header.at("scalar").get<std::string>() != detail::scalar_tag<S>())
      throw ValidationError("checkpoint: " + path + " stores " +
                            header.at("scalar").get<std::string>() + " scalars, this build reads " +
                            detail::scalar_tag<S>());

    Checkpoint<S> ckpt;
    ckpt.config = config_from_json(header.at("config"));

    LabelCatalog catalog;
    for (const auto& title : header.at("catalog").at("titles"))
      catalog.add_title(title.get<std::string>());
    for (const auto& [alias, index] : header.at("catalog").at("aliases").items())
      catalog.add_alias(alias, index.template get<std::size_t>());
    ckpt.catalog = std::move(catalog);

    const auto& vocab_json = header.at("vocab");
    Vocabulary vocab(vocab_json.at("min_freq").get<std::size_t>());
    const auto tokens = vocab_json.at("tokens").get<std::vector<std::string>>();
    if (tokens.size() < 2 || tokens[0] != "<pad>" || tokens[1] != "<unk>")
      throw ValidationError("checkpoint: " + path + " has a malformed vocabulary");
    for (std::size_t i = 2; i < tokens.size(); ++i) vocab.add(tokens[i]);
    ckpt.vocab = std::move(vocab);

    const auto& manifest = header.at("tensors");
    ckpt.params.convs.resize(ckpt.config.conv_kernel_widths.size());
    std::size_t entry = 0;
    ckpt.params.for_each([&](const char* name, Tensor<S>& t) {
      if (entry >= manifest.size())
        throw RuntimeError("checkpoint: " + path + " is missing tensor " + std::string(name));
      const auto& m = manifest.at(entry++);
      if (m.at("name").get<std::string>() != name)
        throw RuntimeError("checkpoint: " + path + " tensor order mismatch at " +
                           std::string(name));
      const auto shape = m.at("shape").get<std::vector<std::size_t>>();
      const std::size_t offset = m.at("offset").get<std::size_t>();
      const std::size_t count = m.at("count").get<std::size_t>();
      const std::size_t end = payload_at + offset + count * sizeof(S);
      if (end > blob.size()) throw RuntimeError("checkpoint: " + path + " is truncated");
      Tensor<S> tensor = Tensor<S>::zeros(shape);
      if (tensor.numel() != count)
        throw RuntimeError("checkpoint: " + path + " tensor " + std::string(name) +
                           " count disagrees with its shape");
      for (std::size_t i = 0; i < count; ++i)
        detail::get_scalar(blob, payload_at + offset + i * sizeof(S), tensor.data()[i]);
      t = std::move(tensor);
    });
    if (entry != manifest.size())
      throw RuntimeError("checkpoint: " + path + " has extra tensors");

    audit_param_shapes(ckpt.params, ckpt.config);
    if (ckpt.catalog.size() != ckpt.config.num_labels)
      throw ValidationError("checkpoint: " + path + " catalog disagrees with its config");
    if (ckpt.vocab.size() != ckpt.config.vocab_size)
      throw ValidationError("checkpoint: " + path + " vocabulary disagrees with its config");
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeError("checkpoint: " + path + " has a corrupt header: " + e.what());
  }
}

}  // namespace jobml
