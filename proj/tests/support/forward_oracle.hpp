#pragma once

// Straight-line reference implementation of the network forward pass in plain
// double loops, written without the tape machinery so the two implementations
// can cross-check each other.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "jobml/model.hpp"
#include "jobml/textpipe.hpp"

namespace testsupport {

namespace oracle_detail {

using Vec = std::vector<double>;

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// gate[u] = act(x.W[:,u] + h.U[:,u] + b[u])
inline Vec gate(const Vec& x, const Vec& h, const jobml::Tensor<double>& w,
                const jobml::Tensor<double>& u, const jobml::Tensor<double>& b,
                double (*act)(double)) {
  const std::size_t units = b.dim(0);
  Vec out(units);
  for (std::size_t j = 0; j < units; ++j) {
    double acc = b.values()[j];
    for (std::size_t d = 0; d < x.size(); ++d) acc += x[d] * w.at(d, j);
    for (std::size_t v = 0; v < h.size(); ++v) acc += h[v] * u.at(v, j);
    out[j] = act(acc);
  }
  return out;
}

inline Vec gru_step(const Vec& x, const Vec& h, const jobml::GruDirParams<double>& p) {
  const Vec z = gate(x, h, p.w_z, p.u_z, p.b_z, sig);
  const Vec r = gate(x, h, p.w_r, p.u_r, p.b_r, sig);
  Vec rh(h.size());
  for (std::size_t v = 0; v < h.size(); ++v) rh[v] = r[v] * h[v];
  const Vec cand = gate(x, rh, p.w_h, p.u_h, p.b_h, [](double v) { return std::tanh(v); });
  Vec out(h.size());
  for (std::size_t u = 0; u < h.size(); ++u) out[u] = (1.0 - z[u]) * h[u] + z[u] * cand[u];
  return out;
}

struct LstmHC {
  Vec h, c;
};

inline LstmHC lstm_step(const Vec& x, const Vec& h, const Vec& c,
                        const jobml::LstmDirParams<double>& p) {
  const Vec i = gate(x, h, p.w_i, p.u_i, p.b_i, sig);
  const Vec f = gate(x, h, p.w_f, p.u_f, p.b_f, sig);
  const Vec o = gate(x, h, p.w_o, p.u_o, p.b_o, sig);
  const Vec cand = gate(x, h, p.w_c, p.u_c, p.b_c, [](double v) { return std::tanh(v); });
  LstmHC out;
  out.c.resize(c.size());
  out.h.resize(c.size());
  for (std::size_t u = 0; u < c.size(); ++u) {
    out.c[u] = f[u] * c[u] + i[u] * cand[u];
    out.h[u] = o[u] * std::tanh(out.c[u]);
  }
  return out;
}

}  // namespace oracle_detail

inline std::vector<double> oracle_forward(const jobml::EncodedSequence& seq,
                                          const jobml::ModelParams<double>& p,
                                          const jobml::ModelConfig& c) {
  using oracle_detail::Vec;
  const std::size_t T = c.max_len;
  const std::size_t L = std::min<std::size_t>(seq.true_length, T);

  std::vector<Vec> x(L);
  for (std::size_t t = 0; t < L; ++t) {
    x[t].resize(c.embed_dim);
    for (std::size_t d = 0; d < c.embed_dim; ++d) x[t][d] = p.embedding.at(seq.indices[t], d);
  }

  // Bi-GRU with carry-through masking past L.
  std::vector<Vec> gru(T, Vec(2 * c.gru_units, 0.0));
  {
    Vec h(c.gru_units, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      if (t < L) h = oracle_detail::gru_step(x[t], h, p.gru_fwd);
      std::copy(h.begin(), h.end(), gru[t].begin());
    }
    Vec hb(c.gru_units, 0.0);
    for (std::size_t i = 0; i < T; ++i) {
      const std::size_t t = T - 1 - i;
      if (t < L) hb = oracle_detail::gru_step(x[t], hb, p.gru_bwd);
      std::copy(hb.begin(), hb.end(), gru[t].begin() + static_cast<std::ptrdiff_t>(c.gru_units));
    }
  }

  // Bi-LSTM over the GRU hidden sequence, same masking.
  std::vector<Vec> lstm(T, Vec(2 * c.lstm_units, 0.0));
  {
    Vec h(c.lstm_units, 0.0), cc(c.lstm_units, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      if (t < L) {
        const auto next = oracle_detail::lstm_step(gru[t], h, cc, p.lstm_fwd);
        h = next.h;
        cc = next.c;
      }
      std::copy(h.begin(), h.end(), lstm[t].begin());
    }
    Vec hb(c.lstm_units, 0.0), cb(c.lstm_units, 0.0);
    for (std::size_t i = 0; i < T; ++i) {
      const std::size_t t = T - 1 - i;
      if (t < L) {
        const auto next = oracle_detail::lstm_step(gru[t], hb, cb, p.lstm_bwd);
        hb = next.h;
        cb = next.c;
      }
      std::copy(hb.begin(), hb.end(),
                lstm[t].begin() + static_cast<std::ptrdiff_t>(c.lstm_units));
    }
  }

  // Parallel valid conv1d branches, max-pooled over time, concatenated.
  Vec features;
  const std::size_t channels = 2 * c.lstm_units;
  for (std::size_t branch = 0; branch < c.conv_kernel_widths.size(); ++branch) {
    const std::size_t k = c.conv_kernel_widths[branch];
    const jobml::ConvParams<double>& conv = p.convs[branch];
    for (std::size_t f = 0; f < c.conv_filters; ++f) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t + k <= T; ++t) {
        double acc = conv.bias.values()[f];
        for (std::size_t j = 0; j < k; ++j)
          for (std::size_t ch = 0; ch < channels; ++ch)
            acc += lstm[t + j][ch] * conv.filters.at(f, j, ch);
        best = std::max(best, acc);
      }
      features.push_back(best);
    }
  }

  Vec probs(c.num_labels);
  for (std::size_t l = 0; l < c.num_labels; ++l) {
    double acc = p.dense_b.values()[l];
    for (std::size_t f = 0; f < features.size(); ++f) acc += features[f] * p.dense_w.at(f, l);
    probs[l] = oracle_detail::sig(acc);
  }
  return probs;
}

}  // namespace testsupport
