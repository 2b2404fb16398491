#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "jobml/embed.hpp"
#include "jobml/error.hpp"
#include "jobml/rng.hpp"
#include "jobml/tape.hpp"
#include "jobml/tensor.hpp"
#include "jobml/textpipe.hpp"

namespace jobml {

struct ModelConfig {
  std::size_t vocab_size = 2;
  std::size_t embed_dim = 100;
  std::size_t max_len = 200;
  std::size_t gru_units = 100;   // per direction
  std::size_t lstm_units = 100;  // per direction
  std::size_t conv_filters = 50;
  std::vector<std::size_t> conv_kernel_widths = {3, 5};
  std::size_t num_labels = 68;
  double threshold = 0.5;
  std::size_t batch_size = 256;
  std::size_t epochs = 20;
  std::uint64_t seed = 42;

  void validate() const {
    if (vocab_size < 2) throw ValidationError("config: vocab_size must be >= 2 (PAD and UNK)");
    if (embed_dim < 1) throw ValidationError("config: embed_dim must be >= 1");
    if (max_len < 1) throw ValidationError("config: max_len must be >= 1");
    if (gru_units < 1) throw ValidationError("config: gru_units must be >= 1");
    if (lstm_units < 1) throw ValidationError("config: lstm_units must be >= 1");
    if (conv_filters < 1) throw ValidationError("config: conv_filters must be >= 1");
    if (conv_kernel_widths.empty())
      throw ValidationError("config: conv_kernel_widths must be non-empty");
    for (const std::size_t k : conv_kernel_widths) {
      if (k < 1) throw ValidationError("config: kernel widths must be >= 1");
      if (k > max_len)
        throw ValidationError("config: kernel width " + std::to_string(k) +
                              " exceeds max_len " + std::to_string(max_len));
    }
    if (num_labels < 1) throw ValidationError("config: num_labels must be >= 1");
    if (!(threshold > 0.0 && threshold < 1.0))
      throw ValidationError("config: threshold must be in (0, 1)");
    if (batch_size < 1) throw ValidationError("config: batch_size must be >= 1");
    if (epochs < 1) throw ValidationError("config: epochs must be >= 1");
  }
};

template <typename S>
struct GruDirParams {
  Tensor<S> w_z, u_z, b_z;  // update gate
  Tensor<S> w_r, u_r, b_r;  // reset gate
  Tensor<S> w_h, u_h, b_h;  // candidate
};

template <typename S>
struct LstmDirParams {
  Tensor<S> w_i, u_i, b_i;  // input gate
  Tensor<S> w_f, u_f, b_f;  // forget gate
  Tensor<S> w_o, u_o, b_o;  // output gate
  Tensor<S> w_c, u_c, b_c;  // candidate cell
};

template <typename S>
struct ConvParams {
  Tensor<S> filters;  // [filters, kernel, channels]
  Tensor<S> bias;     // [filters]
};

template <typename S>
struct ModelParams {
  Tensor<S> embedding;  // [vocab, dim]
  GruDirParams<S> gru_fwd, gru_bwd;
  LstmDirParams<S> lstm_fwd, lstm_bwd;
  std::vector<ConvParams<S>> convs;  // one per kernel width
  Tensor<S> dense_w, dense_b;

  // Fixed traversal order; defines init draws, optimizer slots and the
  // checkpoint manifest.
  template <typename Fn>
  void for_each(Fn&& fn) {
    fn("embedding", embedding);
    const auto gru = [&fn](const char* dir, GruDirParams<S>& g) {
      const std::string p(dir);
      fn((p + ".w_z").c_str(), g.w_z); fn((p + ".u_z").c_str(), g.u_z); fn((p + ".b_z").c_str(), g.b_z);
      fn((p + ".w_r").c_str(), g.w_r); fn((p + ".u_r").c_str(), g.u_r); fn((p + ".b_r").c_str(), g.b_r);
      fn((p + ".w_h").c_str(), g.w_h); fn((p + ".u_h").c_str(), g.u_h); fn((p + ".b_h").c_str(), g.b_h);
    };
    gru("gru_fwd", gru_fwd);
    gru("gru_bwd", gru_bwd);
    const auto lstm = [&fn](const char* dir, LstmDirParams<S>& l) {
      const std::string p(dir);
      fn((p + ".w_i").c_str(), l.w_i); fn((p + ".u_i").c_str(), l.u_i); fn((p + ".b_i").c_str(), l.b_i);
      fn((p + ".w_f").c_str(), l.w_f); fn((p + ".u_f").c_str(), l.u_f); fn((p + ".b_f").c_str(), l.b_f);
      fn((p + ".w_o").c_str(), l.w_o); fn((p + ".u_o").c_str(), l.u_o); fn((p + ".b_o").c_str(), l.b_o);
      fn((p + ".w_c").c_str(), l.w_c); fn((p + ".u_c").c_str(), l.u_c); fn((p + ".b_c").c_str(), l.b_c);
    };
    lstm("lstm_fwd", lstm_fwd);
    lstm("lstm_bwd", lstm_bwd);
    for (std::size_t i = 0; i < convs.size(); ++i) {
      const std::string p = "conv" + std::to_string(i);
      fn((p + ".filters").c_str(), convs[i].filters);
      fn((p + ".bias").c_str(), convs[i].bias);
    }
    fn("dense.w", dense_w);
    fn("dense.b", dense_b);
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    const_cast<ModelParams<S>*>(this)->for_each(
        [&fn](const char* name, Tensor<S>& t) { fn(name, static_cast<const Tensor<S>&>(t)); });
  }
};

// Every parameter shape as a pure function of the config, in traversal order.
inline std::vector<std::pair<std::string, std::vector<std::size_t>>> expected_param_shapes(
    const ModelConfig& c) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  out.emplace_back("embedding", std::vector<std::size_t>{c.vocab_size, c.embed_dim});
  const auto rnn = [&out](const std::string& prefix, std::initializer_list<char> gates,
                          std::size_t in_dim, std::size_t units) {
    for (const char g : gates) {
      const std::string s(1, g);
      out.emplace_back(prefix + ".w_" + s, std::vector<std::size_t>{in_dim, units});
      out.emplace_back(prefix + ".u_" + s, std::vector<std::size_t>{units, units});
      out.emplace_back(prefix + ".b_" + s, std::vector<std::size_t>{units});
    }
  };
  rnn("gru_fwd", {'z', 'r', 'h'}, c.embed_dim, c.gru_units);
  rnn("gru_bwd", {'z', 'r', 'h'}, c.embed_dim, c.gru_units);
  const std::size_t lstm_in = 2 * c.gru_units;
  rnn("lstm_fwd", {'i', 'f', 'o', 'c'}, lstm_in, c.lstm_units);
  rnn("lstm_bwd", {'i', 'f', 'o', 'c'}, lstm_in, c.lstm_units);
  const std::size_t channels = 2 * c.lstm_units;
  for (std::size_t i = 0; i < c.conv_kernel_widths.size(); ++i) {
    const std::string p = "conv" + std::to_string(i);
    out.emplace_back(p + ".filters",
                     std::vector<std::size_t>{c.conv_filters, c.conv_kernel_widths[i], channels});
    out.emplace_back(p + ".bias", std::vector<std::size_t>{c.conv_filters});
  }
  out.emplace_back("dense.w", std::vector<std::size_t>{c.conv_kernel_widths.size() * c.conv_filters,
                                                       c.num_labels});
  out.emplace_back("dense.b", std::vector<std::size_t>{c.num_labels});
  return out;
}

// Throws unless every tensor in `params` has exactly the shape the config
// dictates, in the fixed traversal order.
template <typename S>
void audit_param_shapes(const ModelParams<S>& params, const ModelConfig& config) {
  const auto expected = expected_param_shapes(config);
  std::size_t i = 0;
  params.for_each([&](const char* name, const Tensor<S>& t) {
    if (i >= expected.size())
      throw DimensionError("shape audit: unexpected extra parameter " + std::string(name));
    const auto& [want_name, want_shape] = expected[i];
    if (want_name != name)
      throw DimensionError("shape audit: parameter order mismatch, got " + std::string(name) +
                           ", expected " + want_name);
    if (t.shape() != want_shape)
      throw DimensionError("shape audit: " + want_name + " has shape " + t.shape_str() +
                           ", expected " + Tensor<S>::shape_to_string(want_shape));
    ++i;
  });
  if (i != expected.size())
    throw DimensionError("shape audit: missing parameters, got " + std::to_string(i) +
                         " of " + std::to_string(expected.size()));
}

namespace detail {

template <typename S>
Tensor<S> glorot_uniform(const std::vector<std::size_t>& shape, std::size_t fan_in,
                         std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor<S> t = Tensor<S>::zeros(shape);
  for (std::size_t i = 0; i < t.numel(); ++i)
    t.data()[i] = static_cast<S>(rng.uniform(-bound, bound));
  return t;
}

}  // namespace detail

// Weight matrices draw Glorot-uniform values from `rng` in traversal order;
// biases start at zero except the LSTM forget bias (+1). The embedding row
// block is copied from the prepared table.
template <typename S>
ModelParams<S> init_params(const ModelConfig& config, const Tensor<S>& embedding_matrix) {
  config.validate();
  if (embedding_matrix.rank() != 2 || embedding_matrix.dim(0) != config.vocab_size ||
      embedding_matrix.dim(1) != config.embed_dim)
    throw DimensionError("init: embedding matrix has shape " + embedding_matrix.shape_str() +
                         ", expected " +
                         Tensor<S>::shape_to_string({config.vocab_size, config.embed_dim}));
  Rng rng(config.seed);
  ModelParams<S> p;
  p.embedding = embedding_matrix;

  const auto gru_dir = [&](GruDirParams<S>& g) {
    const std::size_t d = config.embed_dim, u = config.gru_units;
    g.w_z = detail::glorot_uniform<S>({d, u}, d, u, rng);
    g.u_z = detail::glorot_uniform<S>({u, u}, u, u, rng);
    g.b_z = Tensor<S>::zeros({u});
    g.w_r = detail::glorot_uniform<S>({d, u}, d, u, rng);
    g.u_r = detail::glorot_uniform<S>({u, u}, u, u, rng);
    g.b_r = Tensor<S>::zeros({u});
    g.w_h = detail::glorot_uniform<S>({d, u}, d, u, rng);
    g.u_h = detail::glorot_uniform<S>({u, u}, u, u, rng);
    g.b_h = Tensor<S>::zeros({u});
  };
  gru_dir(p.gru_fwd);
  gru_dir(p.gru_bwd);

  const auto lstm_dir = [&](LstmDirParams<S>& l) {
    const std::size_t d = 2 * config.gru_units, u = config.lstm_units;
    l.w_i = detail::glorot_uniform<S>({d, u}, d, u, rng);
    l.u_i = detail::glorot_uniform<S>({u, u}, u, u, rng);
    l.b_i = Tensor<S>::zeros({u});
    l.w_f = detail::glorot_uniform<S>({d, u}, d, u, rng);
    l.u_f = detail::glorot_uniform<S>({u, u}, u, u, rng);
    l.b_f = Tensor<S>::full({u}, S(1));  // forget gates start open
    l.w_o = detail::glorot_uniform<S>({d, u}, d, u, rng);
    l.u_o = detail::glorot_uniform<S>({u, u}, u, u, rng);
    l.b_o = Tensor<S>::zeros({u});
    l.w_c = detail::glorot_uniform<S>({d, u}, d, u, rng);
    l.u_c = detail::glorot_uniform<S>({u, u}, u, u, rng);
    l.b_c = Tensor<S>::zeros({u});
  };
  lstm_dir(p.lstm_fwd);
  lstm_dir(p.lstm_bwd);

  const std::size_t channels = 2 * config.lstm_units;
  for (const std::size_t k : config.conv_kernel_widths) {
    ConvParams<S> c;
    c.filters = detail::glorot_uniform<S>({config.conv_filters, k, channels}, k * channels,
                                          config.conv_filters, rng);
    c.bias = Tensor<S>::zeros({config.conv_filters});
    p.convs.push_back(std::move(c));
  }

  const std::size_t feat = config.conv_kernel_widths.size() * config.conv_filters;
  p.dense_w = detail::glorot_uniform<S>({feat, config.num_labels}, feat, config.num_labels, rng);
  p.dense_b = Tensor<S>::zeros({config.num_labels});

  audit_param_shapes(p, config);
  return p;
}

// Tape node ids for one staged parameter set.
struct GruDirNodes {
  NodeId w_z, u_z, b_z, w_r, u_r, b_r, w_h, u_h, b_h;
};
struct LstmDirNodes {
  NodeId w_i, u_i, b_i, w_f, u_f, b_f, w_o, u_o, b_o, w_c, u_c, b_c;
};
struct ConvNodes {
  NodeId filters, bias;
};
struct StagedParams {
  NodeId embedding;
  GruDirNodes gru_fwd, gru_bwd;
  LstmDirNodes lstm_fwd, lstm_bwd;
  std::vector<ConvNodes> convs;
  NodeId dense_w, dense_b;
};

// Put every parameter tensor on the tape. With trainable=false the graph
// records no backward rules at all. The embedding uses sparse (per-row)
// gradients since one example touches only its own tokens' rows.
template <typename S>
StagedParams stage_params(Tape<S>& tape, const ModelParams<S>& p, bool trainable,
                          bool train_embedding = true) {
  StagedParams s;
  s.embedding = tape.param(&p.embedding, trainable && train_embedding, /*sparse_grad=*/true);
  const auto gru = [&](const GruDirParams<S>& g, GruDirNodes& n) {
    n.w_z = tape.param(&g.w_z, trainable); n.u_z = tape.param(&g.u_z, trainable); n.b_z = tape.param(&g.b_z, trainable);
    n.w_r = tape.param(&g.w_r, trainable); n.u_r = tape.param(&g.u_r, trainable); n.b_r = tape.param(&g.b_r, trainable);
    n.w_h = tape.param(&g.w_h, trainable); n.u_h = tape.param(&g.u_h, trainable); n.b_h = tape.param(&g.b_h, trainable);
  };
  gru(p.gru_fwd, s.gru_fwd);
  gru(p.gru_bwd, s.gru_bwd);
  const auto lstm = [&](const LstmDirParams<S>& l, LstmDirNodes& n) {
    n.w_i = tape.param(&l.w_i, trainable); n.u_i = tape.param(&l.u_i, trainable); n.b_i = tape.param(&l.b_i, trainable);
    n.w_f = tape.param(&l.w_f, trainable); n.u_f = tape.param(&l.u_f, trainable); n.b_f = tape.param(&l.b_f, trainable);
    n.w_o = tape.param(&l.w_o, trainable); n.u_o = tape.param(&l.u_o, trainable); n.b_o = tape.param(&l.b_o, trainable);
    n.w_c = tape.param(&l.w_c, trainable); n.u_c = tape.param(&l.u_c, trainable); n.b_c = tape.param(&l.b_c, trainable);
  };
  lstm(p.lstm_fwd, s.lstm_fwd);
  lstm(p.lstm_bwd, s.lstm_bwd);
  for (const auto& c : p.convs)
    s.convs.push_back({tape.param(&c.filters, trainable), tape.param(&c.bias, trainable)});
  s.dense_w = tape.param(&p.dense_w, trainable);
  s.dense_b = tape.param(&p.dense_b, trainable);
  return s;
}

// Node ids in the same order ModelParams::for_each visits tensors.
inline std::vector<NodeId> staged_param_ids(const StagedParams& s) {
  std::vector<NodeId> ids;
  ids.push_back(s.embedding);
  for (const GruDirNodes* g : {&s.gru_fwd, &s.gru_bwd})
    for (const NodeId id : {g->w_z, g->u_z, g->b_z, g->w_r, g->u_r, g->b_r, g->w_h, g->u_h, g->b_h})
      ids.push_back(id);
  for (const LstmDirNodes* l : {&s.lstm_fwd, &s.lstm_bwd})
    for (const NodeId id : {l->w_i, l->u_i, l->b_i, l->w_f, l->u_f, l->b_f, l->w_o, l->u_o,
                            l->b_o, l->w_c, l->u_c, l->b_c})
      ids.push_back(id);
  for (const ConvNodes& c : s.convs) {
    ids.push_back(c.filters);
    ids.push_back(c.bias);
  }
  ids.push_back(s.dense_w);
  ids.push_back(s.dense_b);
  return ids;
}

// z = sigmoid(x Wz + h Uz + bz); r = sigmoid(x Wr + h Ur + br)
// h~ = tanh(x Wh + (r*h) Uh + bh); h' = (1-z)*h + z*h~
template <typename S>
NodeId gru_cell(Tape<S>& tape, NodeId x, NodeId h_prev, const GruDirNodes& w) {
  const NodeId z = tape.sigmoid(
      tape.add(tape.add(tape.matmul(x, w.w_z), tape.matmul(h_prev, w.u_z)), w.b_z));
  const NodeId r = tape.sigmoid(
      tape.add(tape.add(tape.matmul(x, w.w_r), tape.matmul(h_prev, w.u_r)), w.b_r));
  const NodeId cand = tape.tanh(tape.add(
      tape.add(tape.matmul(x, w.w_h), tape.matmul(tape.mul(r, h_prev), w.u_h)), w.b_h));
  return tape.add(tape.mul(tape.one_minus(z), h_prev), tape.mul(z, cand));
}

template <typename S>
struct LstmState {
  NodeId h, c;
};

// i,f,o = sigmoid(x W + h U + b); c~ = tanh(x Wc + h Uc + bc)
// c' = f*c + i*c~; h' = o*tanh(c')
template <typename S>
LstmState<S> lstm_cell(Tape<S>& tape, NodeId x, NodeId h_prev, NodeId c_prev,
                       const LstmDirNodes& w) {
  const NodeId i = tape.sigmoid(
      tape.add(tape.add(tape.matmul(x, w.w_i), tape.matmul(h_prev, w.u_i)), w.b_i));
  const NodeId f = tape.sigmoid(
      tape.add(tape.add(tape.matmul(x, w.w_f), tape.matmul(h_prev, w.u_f)), w.b_f));
  const NodeId o = tape.sigmoid(
      tape.add(tape.add(tape.matmul(x, w.w_o), tape.matmul(h_prev, w.u_o)), w.b_o));
  const NodeId cand = tape.tanh(
      tape.add(tape.add(tape.matmul(x, w.w_c), tape.matmul(h_prev, w.u_c)), w.b_c));
  const NodeId c_next = tape.add(tape.mul(f, c_prev), tape.mul(i, cand));
  return {tape.mul(o, tape.tanh(c_next)), c_next};
}

namespace detail {

// Runs one direction over T positions using the first L entries of xs as real
// inputs. Positions at or past L reuse the hidden state unchanged: going
// forward that carries the last real hidden value into the tail, going
// backward it leaves the initial zero state across the tail before stepping
// through the real tokens in reverse.
template <typename S, typename Step>
std::vector<NodeId> rnn_direction(Tape<S>& tape, const std::vector<NodeId>& xs, std::size_t T,
                                  std::size_t L, std::size_t units, bool reverse, Step step) {
  std::vector<NodeId> hs(T);
  NodeId h = tape.leaf(Tensor<S>::zeros({1, units}));
  for (std::size_t i = 0; i < T; ++i) {
    const std::size_t t = reverse ? T - 1 - i : i;
    if (t < L) h = step(xs[t], h);
    hs[t] = h;
  }
  return hs;
}

}  // namespace detail

// Bidirectional GRU layer: [T] inputs of width D -> [T, 2*units] node.
template <typename S>
NodeId bi_gru_layer(Tape<S>& tape, const std::vector<NodeId>& xs, std::size_t T, std::size_t L,
                    std::size_t units, const GruDirNodes& fwd, const GruDirNodes& bwd) {
  const auto f = detail::rnn_direction<S>(
      tape, xs, T, L, units, false,
      [&](NodeId x, NodeId h) { return gru_cell(tape, x, h, fwd); });
  const auto b = detail::rnn_direction<S>(
      tape, xs, T, L, units, true,
      [&](NodeId x, NodeId h) { return gru_cell(tape, x, h, bwd); });
  return tape.concat({tape.concat(f, 0), tape.concat(b, 0)}, 1);
}

// Bidirectional LSTM layer with the same carry-through masking.
template <typename S>
NodeId bi_lstm_layer(Tape<S>& tape, const std::vector<NodeId>& xs, std::size_t T, std::size_t L,
                     std::size_t units, const LstmDirNodes& fwd, const LstmDirNodes& bwd) {
  const auto run = [&](const LstmDirNodes& w, bool reverse) {
    NodeId c = tape.leaf(Tensor<S>::zeros({1, units}));
    return detail::rnn_direction<S>(tape, xs, T, L, units, reverse, [&](NodeId x, NodeId h) {
      const LstmState<S> next = lstm_cell(tape, x, h, c, w);
      c = next.c;
      return next.h;
    });
  };
  const auto f = run(fwd, false);
  const auto b = run(bwd, true);
  return tape.concat({tape.concat(f, 0), tape.concat(b, 0)}, 1);
}

// Full network graph for one example:
// embed -> Bi-GRU -> Bi-LSTM -> parallel conv1d branches -> max-pool-over-time
// -> concat -> dense -> sigmoid. Returns the [1, num_labels] probability node.
// Only the first true_length positions are embedded, so padded positions can
// never influence the output.
template <typename S>
NodeId forward_graph(Tape<S>& tape, const StagedParams& staged, const EncodedSequence& encoded,
                     const ModelConfig& config) {
  const std::size_t T = config.max_len;
  if (encoded.indices.size() != T)
    throw DimensionError("forward: encoded length " + std::to_string(encoded.indices.size()) +
                         ", expected max_len " + std::to_string(T));
  const std::size_t L = std::min<std::size_t>(encoded.true_length, T);

  std::vector<NodeId> xs;
  if (L > 0) {
    const std::vector<std::size_t> rows(encoded.indices.begin(), encoded.indices.begin() + L);
    const NodeId emb = tape.gather_rows(staged.embedding, rows);  // [L, D]
    xs.reserve(L);
    for (std::size_t t = 0; t < L; ++t) xs.push_back(tape.slice(emb, 0, t, 1));
  }

  const NodeId gru_seq =
      bi_gru_layer(tape, xs, T, L, config.gru_units, staged.gru_fwd, staged.gru_bwd);

  std::vector<NodeId> ys;
  ys.reserve(L);
  for (std::size_t t = 0; t < L; ++t) ys.push_back(tape.slice(gru_seq, 0, t, 1));
  const NodeId lstm_seq =
      bi_lstm_layer(tape, ys, T, L, config.lstm_units, staged.lstm_fwd, staged.lstm_bwd);

  std::vector<NodeId> pooled;
  pooled.reserve(staged.convs.size());
  for (const ConvNodes& conv : staged.convs)
    pooled.push_back(tape.max_pool_over_time(tape.conv1d(lstm_seq, conv.filters, conv.bias)));
  const NodeId features = pooled.size() == 1 ? pooled[0] : tape.concat(pooled, 1);
  return tape.sigmoid(tape.dense(features, staged.dense_w, staged.dense_b));
}

// Inference forward pass; builds a throwaway gradient-free tape.
template <typename S>
std::vector<S> run_forward(const EncodedSequence& encoded, const ModelParams<S>& params,
                           const ModelConfig& config) {
  Tape<S> tape;
  const StagedParams staged = stage_params(tape, params, /*trainable=*/false);
  const NodeId probs = forward_graph(tape, staged, encoded, config);
  const Tensor<S>& v = tape.value(probs);
  return std::vector<S>(v.values().begin(), v.values().end());
}

// Strictly greater than the threshold; probabilities exactly at the threshold
// are excluded.
template <typename S>
std::set<std::size_t> predict_labels(const std::vector<S>& probs, double threshold) {
  std::set<std::size_t> labels;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (static_cast<double>(probs[i]) > threshold) labels.insert(i);
  return labels;
}

template <typename S>
struct Prediction {
  std::vector<S> probs;
  std::set<std::size_t> labels;
};

template <typename S>
Prediction<S> predict(const EncodedSequence& encoded, const ModelParams<S>& params,
                      const ModelConfig& config) {
  Prediction<S> out;
  out.probs = run_forward(encoded, params, config);
  out.labels = predict_labels(out.probs, config.threshold);
  return out;
}

// Multi-hot target row for one record's label set.
template <typename S>
Tensor<S> make_target(const std::set<std::size_t>& labels, std::size_t num_labels) {
  Tensor<S> t = Tensor<S>::zeros({1, num_labels});
  for (const std::size_t i : labels) {
    if (i >= num_labels)
      throw ValidationError("target: label index " + std::to_string(i) + " out of range");
    t.at(0, i) = S(1);
  }
  return t;
}

}  // namespace jobml
