#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jobml/error.hpp"
#include "jobml/tensor.hpp"

namespace jobml {

using NodeId = std::size_t;

// Reverse-mode differentiation over a linear tape. Nodes are appended in
// evaluation order, which is already topological, so backward() is a single
// reverse sweep. One tape per training example; tapes are single-threaded.
template <typename S>
class Tape {
 public:

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // When enabled, every primitive checks its output for NaN/Inf.
  void set_check_finite(bool on) { check_finite_ = on; }

  std::size_t size() const { return nodes_.size(); }

  // Owning leaf (inputs, constants, targets).
  NodeId leaf(Tensor<S> value, bool requires_grad = false) {
    Node n;
    n.owned = std::move(value);
    n.requires_grad = requires_grad;
    return push(std::move(n), "leaf");
  }

  // Non-owning leaf over a parameter tensor that outlives the tape. With
  // sparse_grad set, gradients land in a row map instead of a dense tensor
  // (used for the embedding table, where a dense per-example gradient would
  // be mostly zeros).
  NodeId param(const Tensor<S>* value, bool requires_grad = true, bool sparse_grad = false) {
    Node n;
    n.external = value;
    n.requires_grad = requires_grad;
    n.sparse_grad = sparse_grad;
    return push(std::move(n), "param");
  }

  const Tensor<S>& value(NodeId id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.owned;
  }

  bool has_grad(NodeId id) const { return nodes_[id].grad_live; }

  const Tensor<S>& grad_view(NodeId id) const { return nodes_[id].grad; }

  // Gradient of a node, zeros if nothing reached it.
  Tensor<S> grad(NodeId id) const {
    if (nodes_[id].grad_live) return nodes_[id].grad;
    return Tensor<S>::zeros(value(id).shape());
  }

  const std::unordered_map<std::size_t, std::vector<S>>& sparse_grad_rows(NodeId id) const {
    return nodes_[id].sparse_rows;
  }

  // ---- primitives ---------------------------------------------------------

  NodeId matmul(NodeId a, NodeId b) {
    const Tensor<S>& va = value(a);
    const Tensor<S>& vb = value(b);
    if (va.rank() != 2 || vb.rank() != 2 || va.dim(1) != vb.dim(0))
      throw DimensionError("matmul: incompatible shapes " + va.shape_str() + " vs " + vb.shape_str());
    const std::size_t m = va.dim(0), k = va.dim(1), n = vb.dim(1);
    Tensor<S> out({m, n});
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const S av = va.at(i, p);
        if (av == S(0)) continue;
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) += av * vb.at(p, j);
      }
    return record(std::move(out), {a, b}, "matmul", [this, a, b](const Tensor<S>& g) {
      const Tensor<S>& va = value(a);
      const Tensor<S>& vb = value(b);
      const std::size_t m = va.dim(0), k = va.dim(1), n = vb.dim(1);
      if (wants_grad(a)) {
        Tensor<S>& ga = grad_buf(a);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const S gv = g.at(i, j);
            if (gv == S(0)) continue;
            for (std::size_t p = 0; p < k; ++p) ga.at(i, p) += gv * vb.at(p, j);
          }
      }
      if (wants_grad(b)) {
        Tensor<S>& gb = grad_buf(b);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const S av = va.at(i, p);
            if (av == S(0)) continue;
            for (std::size_t j = 0; j < n; ++j) gb.at(p, j) += av * g.at(i, j);
          }
      }
    });
  }

  // Elementwise add; also accepts a rank-1 bias broadcast over the rows of a
  // rank-2 left operand.
  NodeId add(NodeId a, NodeId b) {
    const Tensor<S>& va = value(a);
    const Tensor<S>& vb = value(b);
    const bool bias = va.rank() == 2 && vb.rank() == 1 && vb.dim(0) == va.dim(1);
    if (!bias) require_same_shape(va, vb, "add");
    Tensor<S> out = va;
    if (bias) {
      for (std::size_t i = 0; i < va.dim(0); ++i)
        for (std::size_t j = 0; j < va.dim(1); ++j) out.at(i, j) += vb[j];
    } else {
      for (std::size_t i = 0; i < out.numel(); ++i) out[i] += vb[i];
    }
    return record(std::move(out), {a, b}, "add", [this, a, b, bias](const Tensor<S>& g) {
      if (wants_grad(a)) {
        Tensor<S>& ga = grad_buf(a);
        for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i];
      }
      if (wants_grad(b)) {
        Tensor<S>& gb = grad_buf(b);
        if (bias) {
          for (std::size_t i = 0; i < g.dim(0); ++i)
            for (std::size_t j = 0; j < g.dim(1); ++j) gb[j] += g.at(i, j);
        } else {
          for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g[i];
        }
      }
    });
  }

  NodeId mul(NodeId a, NodeId b) {
    const Tensor<S>& va = value(a);
    const Tensor<S>& vb = value(b);
    require_same_shape(va, vb, "mul");
    Tensor<S> out = va;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= vb[i];
    return record(std::move(out), {a, b}, "mul", [this, a, b](const Tensor<S>& g) {
      const Tensor<S>& va = value(a);
      const Tensor<S>& vb = value(b);
      if (wants_grad(a)) {
        Tensor<S>& ga = grad_buf(a);
        for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * vb[i];
      }
      if (wants_grad(b)) {
        Tensor<S>& gb = grad_buf(b);
        for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g[i] * va[i];
      }
    });
  }

  NodeId one_minus(NodeId a) {
    Tensor<S> out = value(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = S(1) - out[i];
    return record(std::move(out), {a}, "one_minus", [this, a](const Tensor<S>& g) {
      if (!wants_grad(a)) return;
      Tensor<S>& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.numel(); ++i) ga[i] -= g[i];
    });
  }

  NodeId sigmoid(NodeId a) {
    Tensor<S> out = value(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = S(1) / (S(1) + std::exp(-out[i]));
    return record(std::move(out), {a}, "sigmoid", [this, a](const Tensor<S>& g, NodeId self) {
      if (!wants_grad(a)) return;
      const Tensor<S>& y = value(self);
      Tensor<S>& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * y[i] * (S(1) - y[i]);
    });
  }

  NodeId tanh(NodeId a) {
    Tensor<S> out = value(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::tanh(out[i]);
    return record(std::move(out), {a}, "tanh", [this, a](const Tensor<S>& g, NodeId self) {
      if (!wants_grad(a)) return;
      const Tensor<S>& y = value(self);
      Tensor<S>& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * (S(1) - y[i] * y[i]);
    });
  }

  NodeId relu(NodeId a) {
    Tensor<S> out = value(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = out[i] > S(0) ? out[i] : S(0);
    return record(std::move(out), {a}, "relu", [this, a](const Tensor<S>& g) {
      if (!wants_grad(a)) return;
      const Tensor<S>& x = value(a);
      Tensor<S>& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.numel(); ++i)
        if (x[i] > S(0)) ga[i] += g[i];
    });
  }

  // Concatenate rank-2 tensors along axis 0 (rows) or 1 (columns).
  NodeId concat(const std::vector<NodeId>& ids, std::size_t axis) {
    if (ids.empty()) throw ValidationError("concat: no inputs");
    if (axis > 1) throw DimensionError("concat: axis must be 0 or 1");
    const std::size_t other = 1 - axis;
    const Tensor<S>& first = value(ids[0]);
    if (first.rank() != 2) throw DimensionError("concat: expects rank-2 inputs, got " + first.shape_str());
    std::size_t total = 0;
    for (const NodeId id : ids) {
      const Tensor<S>& v = value(id);
      if (v.rank() != 2 || v.dim(other) != first.dim(other))
        throw DimensionError("concat: shape mismatch " + first.shape_str() + " vs " + v.shape_str());
      total += v.dim(axis);
    }
    std::vector<std::size_t> shape(2);
    shape[axis] = total;
    shape[other] = first.dim(other);
    Tensor<S> out(shape);
    std::size_t offset = 0;
    for (const NodeId id : ids) {
      const Tensor<S>& v = value(id);
      copy_block(out, v, axis, offset);
      offset += v.dim(axis);
    }
    return record(std::move(out), ids, "concat", [this, ids, axis](const Tensor<S>& g) {
      std::size_t offset = 0;
      for (const NodeId id : ids) {
        const Tensor<S>& v = value(id);
        if (wants_grad(id)) {
          Tensor<S>& gi = grad_buf(id);
          accumulate_block(g, gi, axis, offset);
        }
        offset += v.dim(axis);
      }
    });
  }

  // Contiguous rank-2 slice: `len` indices starting at `start` along `axis`.
  NodeId slice(NodeId a, std::size_t axis, std::size_t start, std::size_t len) {
    const Tensor<S>& v = value(a);
    if (v.rank() != 2 || axis > 1) throw DimensionError("slice: expects rank-2 input, got " + v.shape_str());
    if (len == 0 || start + len > v.dim(axis))
      throw DimensionError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + len) +
                           ") out of bounds for " + v.shape_str());
    std::vector<std::size_t> shape = v.shape();
    shape[axis] = len;
    Tensor<S> out(shape);
    const std::size_t rows = shape[0], cols = shape[1];
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        out.at(i, j) = axis == 0 ? v.at(start + i, j) : v.at(i, start + j);
    return record(std::move(out), {a}, "slice", [this, a, axis, start](const Tensor<S>& g) {
      if (!wants_grad(a)) return;
      Tensor<S>& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.dim(0); ++i)
        for (std::size_t j = 0; j < g.dim(1); ++j) {
          if (axis == 0)
            ga.at(start + i, j) += g.at(i, j);
          else
            ga.at(i, start + j) += g.at(i, j);
        }
    });
  }

  // Row lookup into a rank-2 table; the backward pass scatter-adds into the
  // table gradient (dense or sparse depending on the table leaf).
  NodeId gather_rows(NodeId table, std::vector<std::size_t> rows) {
    const Tensor<S>& t = value(table);
    if (t.rank() != 2) throw DimensionError("gather_rows: table must be rank-2, got " + t.shape_str());
    if (rows.empty()) throw ValidationError("gather_rows: no rows requested");
    for (const std::size_t r : rows)
      if (r >= t.dim(0))
        throw DimensionError("gather_rows: row " + std::to_string(r) + " out of bounds for " + t.shape_str());
    const std::size_t cols = t.dim(1);
    Tensor<S> out({rows.size(), cols});
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j) out.at(i, j) = t.at(rows[i], j);
    return record(std::move(out), {table}, "gather_rows",
                  [this, table, rows = std::move(rows)](const Tensor<S>& g) {
                    if (!wants_grad(table)) return;
                    const std::size_t cols = g.dim(1);
                    if (nodes_[table].sparse_grad) {
                      auto& acc = nodes_[table].sparse_rows;
                      for (std::size_t i = 0; i < rows.size(); ++i) {
                        auto& row = acc[rows[i]];
                        if (row.empty()) row.assign(cols, S(0));
                        for (std::size_t j = 0; j < cols; ++j) row[j] += g.at(i, j);
                      }
                      nodes_[table].grad_live = true;
                    } else {
                      Tensor<S>& gt = grad_buf(table);
                      for (std::size_t i = 0; i < rows.size(); ++i)
                        for (std::size_t j = 0; j < cols; ++j) gt.at(rows[i], j) += g.at(i, j);
                    }
                  });
  }

  // 1-D convolution over time: seq [T, C], filters [F, k, C], bias [F],
  // stride 1, valid padding -> [T-k+1, F].
  NodeId conv1d(NodeId seq, NodeId filters, NodeId bias) {
    const Tensor<S>& x = value(seq);
    const Tensor<S>& w = value(filters);
    const Tensor<S>& b = value(bias);
    if (x.rank() != 2 || w.rank() != 3 || x.dim(1) != w.dim(2))
      throw DimensionError("conv1d: incompatible shapes " + x.shape_str() + " vs " + w.shape_str());
    const std::size_t t_len = x.dim(0), channels = x.dim(1);
    const std::size_t n_filters = w.dim(0), width = w.dim(1);
    if (b.rank() != 1 || b.dim(0) != n_filters)
      throw DimensionError("conv1d: bias " + b.shape_str() + " does not match filters " + w.shape_str());
    if (t_len < width)
      throw DimensionError("conv1d: sequence " + x.shape_str() + " shorter than kernel width " +
                           std::to_string(width));
    const std::size_t out_len = t_len - width + 1;
    Tensor<S> out({out_len, n_filters});
    for (std::size_t t = 0; t < out_len; ++t)
      for (std::size_t f = 0; f < n_filters; ++f) {
        S acc = b[f];
        for (std::size_t j = 0; j < width; ++j)
          for (std::size_t c = 0; c < channels; ++c) acc += x.at(t + j, c) * w.at(f, j, c);
        out.at(t, f) = acc;
      }
    return record(std::move(out), {seq, filters, bias},
                  "conv1d", [this, seq, filters, bias](const Tensor<S>& g) {
                    const Tensor<S>& x = value(seq);
                    const Tensor<S>& w = value(filters);
                    const std::size_t channels = x.dim(1);
                    const std::size_t n_filters = w.dim(0), width = w.dim(1);
                    const std::size_t out_len = g.dim(0);
                    if (wants_grad(seq)) {
                      Tensor<S>& gx = grad_buf(seq);
                      for (std::size_t t = 0; t < out_len; ++t)
                        for (std::size_t f = 0; f < n_filters; ++f) {
                          const S gv = g.at(t, f);
                          if (gv == S(0)) continue;
                          for (std::size_t j = 0; j < width; ++j)
                            for (std::size_t c = 0; c < channels; ++c)
                              gx.at(t + j, c) += gv * w.at(f, j, c);
                        }
                    }
                    if (wants_grad(filters)) {
                      Tensor<S>& gw = grad_buf(filters);
                      for (std::size_t t = 0; t < out_len; ++t)
                        for (std::size_t f = 0; f < n_filters; ++f) {
                          const S gv = g.at(t, f);
                          if (gv == S(0)) continue;
                          for (std::size_t j = 0; j < width; ++j)
                            for (std::size_t c = 0; c < channels; ++c)
                              gw.at(f, j, c) += gv * x.at(t + j, c);
                        }
                    }
                    if (wants_grad(bias)) {
                      Tensor<S>& gb = grad_buf(bias);
                      for (std::size_t t = 0; t < out_len; ++t)
                        for (std::size_t f = 0; f < n_filters; ++f) gb[f] += g.at(t, f);
                    }
                  });
  }

  // Max over the time axis: [T, F] -> [1, F]. Ties keep the earliest step.
  NodeId max_pool_over_time(NodeId a) {
    const Tensor<S>& x = value(a);
    if (x.rank() != 2) throw DimensionError("max_pool_over_time: expects rank-2 input, got " + x.shape_str());
    const std::size_t t_len = x.dim(0), feats = x.dim(1);
    Tensor<S> out({1, feats});
    std::vector<std::size_t> argmax(feats, 0);
    for (std::size_t f = 0; f < feats; ++f) {
      S best = x.at(0, f);
      for (std::size_t t = 1; t < t_len; ++t)
        if (x.at(t, f) > best) {
          best = x.at(t, f);
          argmax[f] = t;
        }
      out.at(0, f) = best;
    }
    return record(std::move(out), {a}, "max_pool_over_time",
                  [this, a, argmax = std::move(argmax)](const Tensor<S>& g) {
                    if (!wants_grad(a)) return;
                    Tensor<S>& ga = grad_buf(a);
                    for (std::size_t f = 0; f < g.dim(1); ++f) ga.at(argmax[f], f) += g.at(0, f);
                  });
  }

  // Affine layer: x @ w + b.
  NodeId dense(NodeId x, NodeId w, NodeId b) { return add(matmul(x, w), b); }

  NodeId sum(NodeId a) {
    const Tensor<S>& x = value(a);
    S total = S(0);
    for (std::size_t i = 0; i < x.numel(); ++i) total += x[i];
    return record(Tensor<S>::scalar(total), {a}, "sum", [this, a](const Tensor<S>& g) {
      if (!wants_grad(a)) return;
      Tensor<S>& ga = grad_buf(a);
      for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += g[0];
    });
  }

  NodeId scale(NodeId a, S factor) {
    Tensor<S> out = value(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= factor;
    return record(std::move(out), {a}, "scale", [this, a, factor](const Tensor<S>& g) {
      if (!wants_grad(a)) return;
      Tensor<S>& ga = grad_buf(a);
      for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * factor;
    });
  }

  // Binary cross-entropy, mean over all elements. Probabilities are clamped
  // to [eps, 1-eps] before the log; the clamp also zeroes the gradient
  // outside that band.
  NodeId bce_loss(NodeId probs, NodeId targets) {
    static constexpr S kEps = S(1e-7);
    const Tensor<S>& p = value(probs);
    const Tensor<S>& y = value(targets);
    require_same_shape(p, y, "bce_loss");
    const std::size_t n = p.numel();
    S total = S(0);
    for (std::size_t i = 0; i < n; ++i) {
      const S pc = std::clamp(p[i], kEps, S(1) - kEps);
      total += -(y[i] * std::log(pc) + (S(1) - y[i]) * std::log(S(1) - pc));
    }
    total /= static_cast<S>(n);
    return record(Tensor<S>::scalar(total), {probs, targets},
                  "bce_loss", [this, probs, targets](const Tensor<S>& g) {
                    if (!wants_grad(probs)) return;
                    const Tensor<S>& p = value(probs);
                    const Tensor<S>& y = value(targets);
                    Tensor<S>& gp = grad_buf(probs);
                    const S inv_n = S(1) / static_cast<S>(p.numel());
                    for (std::size_t i = 0; i < p.numel(); ++i) {
                      if (p[i] < kEps || p[i] > S(1) - kEps) continue;
                      gp[i] += g[0] * inv_n * (-y[i] / p[i] + (S(1) - y[i]) / (S(1) - p[i]));
                    }
                  });
  }

  // ---- backward -----------------------------------------------------------

  // Accumulates gradients of `loss` into every requires_grad node reachable
  // from it; untouched nodes keep zero gradient.
  void backward(NodeId loss) {
    if (loss >= nodes_.size()) throw ValidationError("backward: loss is not on the tape");
    if (value(loss).numel() != 1) throw ValidationError("backward: loss must be scalar, got " + value(loss).shape_str());
    grad_buf(loss)[0] = S(1);
    for (NodeId id = loss + 1; id-- > 0;) {
      Node& n = nodes_[id];
      if (n.grad_live && n.backward) n.backward(n.grad, id);
    }
  }

 private:
  struct Node {
    Tensor<S> owned;
    const Tensor<S>* external = nullptr;
    bool requires_grad = false;
    bool sparse_grad = false;
    bool grad_live = false;
    Tensor<S> grad;
    std::unordered_map<std::size_t, std::vector<S>> sparse_rows;
    std::function<void(const Tensor<S>&, NodeId)> backward;
  };

  bool wants_grad(NodeId id) const { return nodes_[id].requires_grad; }

  Tensor<S>& grad_buf(NodeId id) {
    Node& n = nodes_[id];
    if (!n.grad_live) {
      n.grad = Tensor<S>::zeros(value(id).shape());
      n.grad_live = true;
    }
    return n.grad;
  }

  NodeId push(Node&& n, const char* op) {
    nodes_.push_back(std::move(n));
    const NodeId id = nodes_.size() - 1;
    if (check_finite_ && !value(id).all_finite())
      throw RuntimeError(std::string(op) + ": non-finite values in result");
    return id;
  }

  // Record an op result. The backward callback receives the output gradient;
  // it is attached only when some input requires a gradient.
  template <typename F>
  NodeId record(Tensor<S> out, const std::vector<NodeId>& inputs, const char* op, F&& fn) {
    Node n;
    n.owned = std::move(out);
    n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                  [this](NodeId id) { return nodes_[id].requires_grad; });
    if (n.requires_grad) {
      if constexpr (std::is_invocable_v<F, const Tensor<S>&, NodeId>) {
        n.backward = std::forward<F>(fn);
      } else {
        n.backward = [fn = std::forward<F>(fn)](const Tensor<S>& g, NodeId) { fn(g); };
      }
    }
    return push(std::move(n), op);
  }

  static void copy_block(Tensor<S>& out, const Tensor<S>& v, std::size_t axis,
                         std::size_t offset) {
    for (std::size_t i = 0; i < v.dim(0); ++i)
      for (std::size_t j = 0; j < v.dim(1); ++j) {
        if (axis == 0)
          out.at(offset + i, j) = v.at(i, j);
        else
          out.at(i, offset + j) = v.at(i, j);
      }
  }

  static void accumulate_block(const Tensor<S>& g, Tensor<S>& gi, std::size_t axis,
                               std::size_t offset) {
    for (std::size_t i = 0; i < gi.dim(0); ++i)
      for (std::size_t j = 0; j < gi.dim(1); ++j) {
        if (axis == 0)
          gi.at(i, j) += g.at(offset + i, j);
        else
          gi.at(i, j) += g.at(i, offset + j);
      }
  }

  std::deque<Node> nodes_;
  bool check_finite_ = false;
};

}  // namespace jobml
