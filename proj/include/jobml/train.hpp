#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "jobml/adam.hpp"
#include "jobml/corpus.hpp"
#include "jobml/error.hpp"
#include "jobml/metrics.hpp"
#include "jobml/model.hpp"
#include "jobml/rng.hpp"
#include "jobml/textpipe.hpp"

namespace jobml {

struct LabeledExample {
  std::string id;
  EncodedSequence seq;
  std::set<std::size_t> labels;
};

// clean -> tokenize -> encode each record against the vocabulary.
inline std::vector<LabeledExample> prepare_examples(const std::vector<JobRecord>& records,
                                                    const Vocabulary& vocab,
                                                    std::size_t max_len) {
  std::vector<LabeledExample> out;
  out.reserve(records.size());
  for (const JobRecord& rec : records) {
    LabeledExample ex;
    ex.id = rec.id;
    ex.seq = encode(tokenize(clean_text(rec.description)), vocab, max_len);
    ex.labels = rec.labels;
    out.push_back(std::move(ex));
  }
  return out;
}

// Tokenized training documents, the input to vocabulary building.
inline std::vector<std::vector<std::string>> tokenized_documents(
    const std::vector<JobRecord>& records) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(records.size());
  for (const JobRecord& rec : records) docs.push_back(tokenize(clean_text(rec.description)));
  return docs;
}

template <typename S>
std::vector<LabelSetPair> evaluate_examples(const std::vector<LabeledExample>& examples,
                                            const ModelParams<S>& params,
                                            const ModelConfig& config) {
  std::vector<LabelSetPair> pairs;
  pairs.reserve(examples.size());
  for (const LabeledExample& ex : examples) {
    LabelSetPair pair;
    pair.id = ex.id;
    pair.truth = ex.labels;
    pair.predicted = predict_labels(run_forward(ex.seq, params, config), config.threshold);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

struct TrainOptions {
  std::size_t threads = 1;
  bool freeze_embeddings = false;
  double lr = 1e-3;
};

struct HistoryEntry {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_f1 = 0.0;
};

template <typename S>
struct TrainResult {
  ModelParams<S> best_params;   // snapshot from the best-dev-F1 epoch
  ModelParams<S> final_params;  // state after the last epoch
  std::vector<HistoryEntry> history;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
};

namespace detail {

template <typename S>
struct ExampleGrads {
  std::vector<Tensor<S>> dense;  // per non-embedding trainable, traversal order
  std::unordered_map<std::size_t, std::vector<S>> embedding_rows;
  S loss = S(0);
};

// One example's forward, loss and backward on a private tape.
template <typename S>
ExampleGrads<S> example_grads(const LabeledExample& ex, const ModelParams<S>& params,
                              const ModelConfig& config, bool train_embedding) {
  Tape<S> tape;
  const StagedParams staged = stage_params(tape, params, /*trainable=*/true, train_embedding);
  const NodeId probs = forward_graph(tape, staged, ex.seq, config);
  const NodeId target = tape.leaf(make_target<S>(ex.labels, config.num_labels));
  const NodeId loss = tape.bce_loss(probs, target);
  tape.backward(loss);

  ExampleGrads<S> out;
  out.loss = tape.value(loss).values()[0];
  const std::vector<NodeId> ids = staged_param_ids(staged);
  out.dense.reserve(ids.size() - 1);
  for (std::size_t i = 1; i < ids.size(); ++i) out.dense.push_back(tape.grad(ids[i]));
  if (train_embedding) out.embedding_rows = tape.sparse_grad_rows(staged.embedding);
  return out;
}

}  // namespace detail

// Epoch loop over shuffled batches with Adam updates. Per-example gradients
// are always reduced in example order, so any thread count produces
// bit-identical results. Dev mean example-F1 is recorded each epoch and the
// best-scoring epoch's parameters are kept (ties go to the later epoch).
template <typename S>
TrainResult<S> train(const std::vector<LabeledExample>& train_set,
                     const std::vector<LabeledExample>& dev_set,
                     const Tensor<S>& embedding_matrix, const ModelConfig& config,
                     const TrainOptions& options = {},
                     const std::function<void(const HistoryEntry&)>& on_epoch = nullptr) {
  config.validate();
  if (train_set.empty()) throw ValidationError("train: empty training set");
  for (const LabeledExample& ex : train_set)
    if (ex.seq.indices.size() != config.max_len)
      throw ValidationError("train: example \"" + ex.id + "\" is not encoded to max_len");

  TrainResult<S> result;
  ModelParams<S> params = init_params(config, embedding_matrix);

  // Trainable tensors in traversal order; index 0 is the embedding.
  std::vector<Tensor<S>*> all;
  params.for_each([&](const char*, Tensor<S>& t) { all.push_back(&t); });
  const bool train_embedding = !options.freeze_embeddings;
  std::vector<Tensor<S>*> trainables;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (i != 0 || train_embedding) trainables.push_back(all[i]);

  AdamConfig<S> adam_config;
  adam_config.lr = static_cast<S>(options.lr);
  std::vector<std::vector<std::size_t>> shapes;
  for (const Tensor<S>* t : trainables) shapes.push_back(t->shape());
  AdamState<S> adam(adam_config, shapes);

  std::vector<Tensor<S>> buffers;
  for (const Tensor<S>* t : trainables) buffers.push_back(Tensor<S>::zeros(t->shape()));

  Rng shuffle_rng = Rng(config.seed).split();
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  std::size_t global_step = 0;
  result.best_dev_f1 = -1.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss_sum = 0.0;

    const std::size_t n = order.size();
    std::size_t batch_id = 0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size, ++batch_id) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      const std::size_t batch_count = end - begin;

      for (Tensor<S>& b : buffers) std::fill(b.data(), b.data() + b.numel(), S(0));

      // Gradients may be computed in any order but are reduced in example
      // order below, which pins the floating-point result.
      std::vector<detail::ExampleGrads<S>> grads(batch_count);
      if (threads == 1) {
        for (std::size_t i = 0; i < batch_count; ++i)
          grads[i] = detail::example_grads(train_set[order[begin + i]], params, config,
                                           train_embedding);
      } else {
        std::vector<std::thread> workers;
        const std::size_t chunk = (batch_count + threads - 1) / threads;
        for (std::size_t w = 0; w < threads; ++w) {
          const std::size_t lo = std::min(batch_count, w * chunk);
          const std::size_t hi = std::min(batch_count, lo + chunk);
          if (lo >= hi) break;
          workers.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i)
              grads[i] = detail::example_grads(train_set[order[begin + i]], params, config,
                                               train_embedding);
          });
        }
        for (std::thread& w : workers) w.join();
      }

      double batch_loss_sum = 0.0;
      for (std::size_t i = 0; i < batch_count; ++i) {
        batch_loss_sum += static_cast<double>(grads[i].loss);
        std::size_t dense_at = 0;
        for (std::size_t p = 0; p < trainables.size(); ++p) {
          if (p == 0 && train_embedding) {
            Tensor<S>& buf = buffers[0];
            const std::size_t dim = buf.dim(1);
            for (const auto& [row, vec] : grads[i].embedding_rows) {
              S* dst = buf.data() + row * dim;
              for (std::size_t j = 0; j < dim; ++j) dst[j] += vec[j];
            }
          } else {
            const Tensor<S>& g = grads[i].dense[dense_at++];
            S* dst = buffers[p].data();
            for (std::size_t j = 0; j < g.numel(); ++j) dst[j] += g.values()[j];
          }
        }
      }

      const double batch_loss = batch_loss_sum / static_cast<double>(batch_count);
      ++global_step;
      if (!std::isfinite(batch_loss))
        throw RuntimeError("train: non-finite loss " + std::to_string(batch_loss) + " at step " +
                           std::to_string(global_step) + ", epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_id));
      epoch_loss_sum += batch_loss_sum;

      const S inv = S(1) / static_cast<S>(batch_count);
      for (Tensor<S>& b : buffers)
        for (std::size_t j = 0; j < b.numel(); ++j) b.data()[j] *= inv;

      std::vector<const Tensor<S>*> grad_ptrs;
      for (const Tensor<S>& b : buffers) grad_ptrs.push_back(&b);
      adam.step(trainables, grad_ptrs);
    }

    HistoryEntry entry;
    entry.epoch = epoch;
    entry.train_loss = epoch_loss_sum / static_cast<double>(n);
    entry.dev_f1 =
        dev_set.empty() ? 0.0 : mean_f1(evaluate_examples(dev_set, params, config));
    result.history.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (entry.dev_f1 >= result.best_dev_f1) {
      result.best_dev_f1 = entry.dev_f1;
      result.best_epoch = epoch;
      result.best_params = params;
    }
  }

  result.final_params = std::move(params);
  return result;
}

}  // namespace jobml
