// jobml: multi-label job-title classification toolkit.
//
// Subcommands: stats, vocab, train, eval, predict, report.
// Exit codes: 0 success, 1 validation error, 2 runtime error.
// Data flows over files or stdin/stdout; diagnostics go to stderr.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jobml/jobml.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve_path(const std::string& p, const fs::path& base) {
  if (p.empty()) return p;
  const fs::path pp(p);
  return (pp.is_absolute() ? pp : base / pp).lexically_normal().string();
}

std::string absolute_path(const std::string& p) {
  if (p.empty()) return p;
  return fs::absolute(fs::path(p)).lexically_normal().string();
}

jobml::LabelCatalog catalog_from_option(const std::string& path) {
  return path.empty() ? jobml::LabelCatalog::builtin() : jobml::load_catalog(path);
}

// ---------------------------------------------------------------------------
// Run configuration: flat JSON keys, flag overrides, resolved echo.

struct RunConfig {
  std::string train_corpus;
  std::string test_corpus;
  std::string vectors;
  std::string catalog;
  std::string output_dir;
  std::size_t max_len = 200;
  std::size_t gru_units = 100;
  std::size_t lstm_units = 100;
  std::size_t conv_filters = 50;
  std::vector<std::size_t> conv_kernels = {3, 5};
  double threshold = 0.5;
  std::size_t batch_size = 256;
  std::size_t epochs = 20;
  std::uint64_t seed = 42;
  double lr = 1e-3;
  double dev_fraction = 0.1;
  std::size_t min_freq = 2;
  bool freeze_embeddings = false;
  bool skip_unknown_labels = false;
  std::size_t threads = 1;
  std::size_t embed_dim = 0;  // 0 = take the dimension from the vectors file
};

void apply_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw jobml::ValidationError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw jobml::ValidationError("config: " + path + ": " + e.what());
  }
  if (!j.is_object()) throw jobml::ValidationError("config: " + path + ": expected a JSON object");
  const fs::path base = fs::path(path).parent_path();
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "train_corpus") rc.train_corpus = resolve_path(value.get<std::string>(), base);
      else if (key == "test_corpus") rc.test_corpus = resolve_path(value.get<std::string>(), base);
      else if (key == "vectors") rc.vectors = resolve_path(value.get<std::string>(), base);
      else if (key == "catalog") rc.catalog = resolve_path(value.get<std::string>(), base);
      else if (key == "output_dir") rc.output_dir = resolve_path(value.get<std::string>(), base);
      else if (key == "max_len") rc.max_len = value.get<std::size_t>();
      else if (key == "gru_units") rc.gru_units = value.get<std::size_t>();
      else if (key == "lstm_units") rc.lstm_units = value.get<std::size_t>();
      else if (key == "conv_filters") rc.conv_filters = value.get<std::size_t>();
      else if (key == "conv_kernels") rc.conv_kernels = value.get<std::vector<std::size_t>>();
      else if (key == "threshold") rc.threshold = value.get<double>();
      else if (key == "batch_size") rc.batch_size = value.get<std::size_t>();
      else if (key == "epochs") rc.epochs = value.get<std::size_t>();
      else if (key == "seed") rc.seed = value.get<std::uint64_t>();
      else if (key == "lr") rc.lr = value.get<double>();
      else if (key == "dev_fraction") rc.dev_fraction = value.get<double>();
      else if (key == "min_freq") rc.min_freq = value.get<std::size_t>();
      else if (key == "freeze_embeddings") rc.freeze_embeddings = value.get<bool>();
      else if (key == "skip_unknown_labels") rc.skip_unknown_labels = value.get<bool>();
      else if (key == "threads") rc.threads = value.get<std::size_t>();
      else if (key == "embed_dim") rc.embed_dim = value.get<std::size_t>();
      else throw jobml::ValidationError("config: " + path + ": unknown key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw jobml::ValidationError("config: " + path + ": " + e.what());
  }
}

json run_config_to_json(const RunConfig& rc) {
  return json{{"train_corpus", absolute_path(rc.train_corpus)},
              {"test_corpus", absolute_path(rc.test_corpus)},
              {"vectors", absolute_path(rc.vectors)},
              {"catalog", absolute_path(rc.catalog)},
              {"output_dir", absolute_path(rc.output_dir)},
              {"max_len", rc.max_len},
              {"gru_units", rc.gru_units},
              {"lstm_units", rc.lstm_units},
              {"conv_filters", rc.conv_filters},
              {"conv_kernels", rc.conv_kernels},
              {"threshold", rc.threshold},
              {"batch_size", rc.batch_size},
              {"epochs", rc.epochs},
              {"seed", rc.seed},
              {"lr", rc.lr},
              {"dev_fraction", rc.dev_fraction},
              {"min_freq", rc.min_freq},
              {"freeze_embeddings", rc.freeze_embeddings},
              {"skip_unknown_labels", rc.skip_unknown_labels},
              {"threads", rc.threads},
              {"embed_dim", rc.embed_dim}};
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string corpus;
  std::string catalog;
  bool skip_unknown = false;
};

int run_stats(const StatsArgs& args) {
  const jobml::LabelCatalog catalog = catalog_from_option(args.catalog);
  jobml::LoadOptions opts;
  opts.skip_unknown_labels = args.skip_unknown;
  const jobml::LoadReport report = jobml::load_corpus_report(args.corpus, catalog, opts);
  for (const std::string& w : report.warnings) std::cerr << w << "\n";
  const jobml::CorpusStats stats = jobml::compute_stats(report.records);
  std::cout << jobml::stats_to_json(stats).dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// vocab

struct VocabArgs {
  std::string corpus;
  std::string catalog;
  std::string output;
  std::size_t min_freq = 2;
  bool skip_unknown = false;
};

int run_vocab(const VocabArgs& args) {
  const jobml::LabelCatalog catalog = catalog_from_option(args.catalog);
  jobml::LoadOptions opts;
  opts.skip_unknown_labels = args.skip_unknown;
  const std::vector<jobml::JobRecord> records = jobml::load_corpus(args.corpus, catalog, opts);
  const jobml::Vocabulary vocab =
      jobml::build_vocab(jobml::tokenized_documents(records), args.min_freq);
  jobml::save_vocab(vocab, args.output);
  std::cout << json{{"size", vocab.size()}, {"min_freq", vocab.min_freq()}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

int run_train(const RunConfig& rc) {
  if (rc.train_corpus.empty()) throw jobml::ValidationError("train: train_corpus is required");
  if (rc.output_dir.empty()) throw jobml::ValidationError("train: output_dir is required");

  const jobml::LabelCatalog catalog = catalog_from_option(rc.catalog);
  jobml::LoadOptions load_opts;
  load_opts.skip_unknown_labels = rc.skip_unknown_labels;
  jobml::LoadReport train_report = jobml::load_corpus_report(rc.train_corpus, catalog, load_opts);
  for (const std::string& w : train_report.warnings) std::cerr << w << "\n";
  std::vector<jobml::JobRecord> test_pool;
  if (!rc.test_corpus.empty()) {
    jobml::LoadReport test_report = jobml::load_corpus_report(rc.test_corpus, catalog, load_opts);
    for (const std::string& w : test_report.warnings) std::cerr << w << "\n";
    test_pool = std::move(test_report.records);
  }

  const jobml::CorpusSplit split = jobml::split_corpus(std::move(train_report.records),
                                                       std::move(test_pool), rc.dev_fraction, rc.seed);
  std::cerr << "split: train=" << split.train.size() << " dev=" << split.dev.size()
            << " test=" << split.test.size() << "\n";

  const jobml::Vocabulary vocab =
      jobml::build_vocab(jobml::tokenized_documents(split.train), rc.min_freq);

  jobml::PretrainedVectors<float> vectors;
  if (!rc.vectors.empty()) {
    vectors = jobml::load_vectors<float>(rc.vectors);
    if (rc.embed_dim != 0 && rc.embed_dim != vectors.dim)
      throw jobml::ValidationError("train: embed_dim " + std::to_string(rc.embed_dim) +
                                   " disagrees with vectors file dimension " +
                                   std::to_string(vectors.dim));
  } else {
    vectors.dim = rc.embed_dim == 0 ? 100 : rc.embed_dim;
    vectors.source_name = "(random)";
  }

  jobml::ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.embed_dim = vectors.dim;
  mc.max_len = rc.max_len;
  mc.gru_units = rc.gru_units;
  mc.lstm_units = rc.lstm_units;
  mc.conv_filters = rc.conv_filters;
  mc.conv_kernel_widths = rc.conv_kernels;
  mc.num_labels = catalog.size();
  mc.threshold = rc.threshold;
  mc.batch_size = rc.batch_size;
  mc.epochs = rc.epochs;
  mc.seed = rc.seed;
  mc.validate();

  const jobml::EmbeddingTable<float> table =
      jobml::build_embedding_matrix(vocab, vectors, rc.seed);
  std::cerr << "vocab: " << vocab.size() << " tokens, " << table.oov_count
            << " without pretrained vectors\n";

  const std::vector<jobml::LabeledExample> train_examples =
      jobml::prepare_examples(split.train, vocab, mc.max_len);
  const std::vector<jobml::LabeledExample> dev_examples =
      jobml::prepare_examples(split.dev, vocab, mc.max_len);

  // Resolved configuration: stdout and a copy beside the artifacts, so a rerun
  // from either reproduces this run exactly.
  fs::create_directories(rc.output_dir);
  RunConfig resolved = rc;
  resolved.embed_dim = vectors.dim;
  const json resolved_json = run_config_to_json(resolved);
  std::cout << resolved_json.dump(2) << "\n";
  {
    std::ofstream out(fs::path(rc.output_dir) / "config.json", std::ios::binary);
    out << resolved_json.dump(2) << "\n";
    if (!out) throw jobml::RuntimeError("train: cannot write config.json");
  }

  jobml::TrainOptions opts;
  opts.threads = rc.threads;
  opts.freeze_embeddings = rc.freeze_embeddings;
  opts.lr = rc.lr;

  std::ofstream history(fs::path(rc.output_dir) / "history.jsonl", std::ios::binary);
  if (!history) throw jobml::RuntimeError("train: cannot write history.jsonl");
  const auto on_epoch = [&](const jobml::HistoryEntry& e) {
    history << json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_f1", e.dev_f1}}.dump()
            << "\n";
    std::cerr << "epoch " << e.epoch << "/" << mc.epochs << " train_loss=" << e.train_loss
              << " dev_f1=" << e.dev_f1 << "\n";
  };

  const jobml::TrainResult<float> result =
      jobml::train(train_examples, dev_examples, table.matrix, mc, opts, on_epoch);
  history.close();

  const std::string ckpt_path = (fs::path(rc.output_dir) / "checkpoint.bin").string();
  jobml::save_checkpoint(result.best_params, mc, vocab, catalog, ckpt_path);
  jobml::save_vocab(vocab, (fs::path(rc.output_dir) / "vocab.txt").string());
  std::cerr << "best epoch " << result.best_epoch << " dev_f1=" << result.best_dev_f1
            << "; checkpoint written to " << ckpt_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval / report

struct EvalArgs {
  std::string checkpoint;
  std::string corpus;
  std::string catalog;
  std::size_t samples = 10;
  bool skip_unknown = false;
  bool partial_credit = false;
};

std::vector<jobml::LabelSetPair> pairs_for_corpus(const jobml::Checkpoint<float>& ckpt,
                                                  const EvalArgs& args) {
  if (!args.catalog.empty()) {
    const jobml::LabelCatalog requested = jobml::load_catalog(args.catalog);
    if (!(requested == ckpt.catalog))
      throw jobml::ValidationError("eval: catalog " + args.catalog +
                                   " disagrees with the checkpoint's catalog");
  }
  jobml::LoadOptions opts;
  opts.skip_unknown_labels = args.skip_unknown;
  const jobml::LoadReport report = jobml::load_corpus_report(args.corpus, ckpt.catalog, opts);
  for (const std::string& w : report.warnings) std::cerr << w << "\n";
  const std::vector<jobml::LabeledExample> examples =
      jobml::prepare_examples(report.records, ckpt.vocab, ckpt.config.max_len);
  return jobml::evaluate_examples(examples, ckpt.params, ckpt.config);
}

int run_eval(const EvalArgs& args) {
  const jobml::Checkpoint<float> ckpt = jobml::load_checkpoint<float>(args.checkpoint);
  const std::vector<jobml::LabelSetPair> pairs = pairs_for_corpus(ckpt, args);
  const jobml::EvalReport report = jobml::evaluate_pairs(
      pairs, ckpt.catalog, args.samples,
      args.partial_credit ? jobml::MatchMode::kOverlap : jobml::MatchMode::kExact);
  char line[32];
  std::snprintf(line, sizeof(line), "F1: %.2f\n", report.mean_f1 * 100.0);
  std::cerr << line << jobml::render_match_table(report);
  std::cout << jobml::eval_report_to_json(report).dump(2) << "\n";
  return 0;
}

int run_report(const EvalArgs& args) {
  const jobml::Checkpoint<float> ckpt = jobml::load_checkpoint<float>(args.checkpoint);
  const std::vector<jobml::LabelSetPair> pairs = pairs_for_corpus(ckpt, args);
  const std::vector<jobml::MispredictionSample> samples =
      jobml::misprediction_samples(pairs, ckpt.catalog, args.samples);
  json out = json::array();
  for (const auto& s : samples) {
    out.push_back({{"id", s.id}, {"truth", s.truth_titles}, {"predicted", s.predicted_titles}});
    std::cerr << s.id << "\n  truth:";
    for (const auto& t : s.truth_titles) std::cerr << " [" << t << "]";
    std::cerr << "\n  predicted:";
    for (const auto& t : s.predicted_titles) std::cerr << " [" << t << "]";
    std::cerr << "\n";
  }
  std::cout << json{{"samples", out}}.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string checkpoint;
  std::string input;   // empty = stdin
  std::string output;  // empty = stdout
  bool with_probs = false;
};

int run_predict(const PredictArgs& args) {
  const jobml::Checkpoint<float> ckpt = jobml::load_checkpoint<float>(args.checkpoint);

  std::ifstream file_in;
  if (!args.input.empty()) {
    file_in.open(args.input, std::ios::binary);
    if (!file_in) throw jobml::ValidationError("predict: cannot open " + args.input);
  }
  std::istream& in = args.input.empty() ? std::cin : file_in;

  std::ofstream file_out;
  if (!args.output.empty()) {
    file_out.open(args.output, std::ios::binary | std::ios::trunc);
    if (!file_out) throw jobml::RuntimeError("predict: cannot write " + args.output);
  }
  std::ostream& out = args.output.empty() ? std::cout : file_out;

  std::string line;
  std::size_t line_no = 0;
  bool any_failed = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    std::string id;
    std::string error;
    try {
      const json obj = json::parse(line);
      if (!obj.is_object()) throw jobml::ValidationError("expected a JSON object");
      if (obj.contains("id") && obj["id"].is_string()) id = obj["id"].get<std::string>();
      if (!obj.contains("description") || !obj["description"].is_string())
        throw jobml::ValidationError("missing string field \"description\"");
      const jobml::EncodedSequence seq =
          jobml::encode(jobml::tokenize(jobml::clean_text(obj["description"].get<std::string>())),
                        ckpt.vocab, ckpt.config.max_len);
      const jobml::Prediction<float> pred = jobml::predict(seq, ckpt.params, ckpt.config);
      record["id"] = id;
      json labels = json::array();
      for (const std::size_t idx : pred.labels) labels.push_back(ckpt.catalog.title(idx));
      record["labels"] = labels;
      if (args.with_probs) record["probs"] = pred.probs;
    } catch (const std::exception& e) {
      any_failed = true;
      record = json{{"line", line_no}, {"error", e.what()}};
      if (!id.empty()) record["id"] = id;
    }
    out << record.dump() << "\n";
  }
  if (!out) throw jobml::RuntimeError("predict: output write failed");
  return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-label job title classification toolkit"};
  app.require_subcommand(1);

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "print corpus statistics as JSON");
  stats->add_option("--corpus", stats_args.corpus, "JSONL corpus path")->required();
  stats->add_option("--catalog", stats_args.catalog, "label catalog file (default: built-in)");
  stats->add_flag("--skip-unknown-labels", stats_args.skip_unknown,
                  "drop unknown labels instead of failing");

  VocabArgs vocab_args;
  CLI::App* vocab = app.add_subcommand("vocab", "build and save a vocabulary");
  vocab->add_option("--corpus", vocab_args.corpus, "JSONL corpus path")->required();
  vocab->add_option("--catalog", vocab_args.catalog, "label catalog file (default: built-in)");
  vocab->add_option("--output,-o", vocab_args.output, "vocabulary output path")->required();
  vocab->add_option("--min-freq", vocab_args.min_freq, "minimum token frequency");
  vocab->add_flag("--skip-unknown-labels", vocab_args.skip_unknown,
                  "drop unknown labels instead of failing");

  RunConfig rc;
  std::string config_path;
  CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
  train->add_option("--config", config_path, "JSON run configuration");
  auto* o_train_corpus = train->add_option("--train-corpus", rc.train_corpus);
  auto* o_test_corpus = train->add_option("--test-corpus", rc.test_corpus);
  auto* o_vectors = train->add_option("--vectors", rc.vectors, "pretrained word vectors (text)");
  auto* o_catalog = train->add_option("--catalog", rc.catalog);
  auto* o_output_dir = train->add_option("--output-dir", rc.output_dir);
  auto* o_max_len = train->add_option("--max-len", rc.max_len);
  auto* o_gru = train->add_option("--gru-units", rc.gru_units);
  auto* o_lstm = train->add_option("--lstm-units", rc.lstm_units);
  auto* o_filters = train->add_option("--conv-filters", rc.conv_filters);
  auto* o_kernels = train->add_option("--conv-kernels", rc.conv_kernels);
  auto* o_threshold = train->add_option("--threshold", rc.threshold);
  auto* o_batch = train->add_option("--batch-size", rc.batch_size);
  auto* o_epochs = train->add_option("--epochs", rc.epochs);
  auto* o_seed = train->add_option("--seed", rc.seed);
  auto* o_lr = train->add_option("--lr", rc.lr);
  auto* o_dev_fraction = train->add_option("--dev-fraction", rc.dev_fraction);
  auto* o_min_freq = train->add_option("--min-freq", rc.min_freq);
  auto* o_freeze = train->add_flag("--freeze-embeddings", rc.freeze_embeddings);
  auto* o_skip = train->add_flag("--skip-unknown-labels", rc.skip_unknown_labels);
  auto* o_threads = train->add_option("--threads", rc.threads);
  auto* o_embed_dim = train->add_option("--embed-dim", rc.embed_dim);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  eval->add_option("--checkpoint", eval_args.checkpoint)->required();
  eval->add_option("--corpus", eval_args.corpus)->required();
  eval->add_option("--catalog", eval_args.catalog, "must match the checkpoint's catalog");
  eval->add_option("--samples", eval_args.samples, "misprediction samples in the report");
  eval->add_flag("--skip-unknown-labels", eval_args.skip_unknown);
  eval->add_flag("--partial-credit", eval_args.partial_credit,
                 "count any label overlap as correct in the table");

  EvalArgs report_args;
  CLI::App* report = app.add_subcommand("report", "dump mispredicted samples");
  report->add_option("--checkpoint", report_args.checkpoint)->required();
  report->add_option("--corpus", report_args.corpus)->required();
  report->add_option("--catalog", report_args.catalog);
  report->add_option("--limit", report_args.samples, "maximum samples");
  report->add_flag("--skip-unknown-labels", report_args.skip_unknown);

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "predict labels for JSONL input");
  predict->add_option("--checkpoint", predict_args.checkpoint)->required();
  predict->add_option("--input", predict_args.input, "JSONL input (default: stdin)");
  predict->add_option("--output", predict_args.output, "JSONL output (default: stdout)");
  predict->add_flag("--probs", predict_args.with_probs, "include per-label probabilities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*stats) return run_stats(stats_args);
    if (*vocab) return run_vocab(vocab_args);
    if (*train) {
      // File values first, then flag overrides on top of them.
      if (!config_path.empty()) {
        RunConfig from_file;
        apply_config_file(from_file, config_path);
        const RunConfig from_flags = rc;
        rc = from_file;
        if (o_train_corpus->count()) rc.train_corpus = absolute_path(from_flags.train_corpus);
        if (o_test_corpus->count()) rc.test_corpus = absolute_path(from_flags.test_corpus);
        if (o_vectors->count()) rc.vectors = absolute_path(from_flags.vectors);
        if (o_catalog->count()) rc.catalog = absolute_path(from_flags.catalog);
        if (o_output_dir->count()) rc.output_dir = absolute_path(from_flags.output_dir);
        if (o_max_len->count()) rc.max_len = from_flags.max_len;
        if (o_gru->count()) rc.gru_units = from_flags.gru_units;
        if (o_lstm->count()) rc.lstm_units = from_flags.lstm_units;
        if (o_filters->count()) rc.conv_filters = from_flags.conv_filters;
        if (o_kernels->count()) rc.conv_kernels = from_flags.conv_kernels;
        if (o_threshold->count()) rc.threshold = from_flags.threshold;
        if (o_batch->count()) rc.batch_size = from_flags.batch_size;
        if (o_epochs->count()) rc.epochs = from_flags.epochs;
        if (o_seed->count()) rc.seed = from_flags.seed;
        if (o_lr->count()) rc.lr = from_flags.lr;
        if (o_dev_fraction->count()) rc.dev_fraction = from_flags.dev_fraction;
        if (o_min_freq->count()) rc.min_freq = from_flags.min_freq;
        if (o_freeze->count()) rc.freeze_embeddings = from_flags.freeze_embeddings;
        if (o_skip->count()) rc.skip_unknown_labels = from_flags.skip_unknown_labels;
        if (o_threads->count()) rc.threads = from_flags.threads;
        if (o_embed_dim->count()) rc.embed_dim = from_flags.embed_dim;
      }
      return run_train(rc);
    }
    if (*eval) return run_eval(eval_args);
    if (*report) return run_report(report_args);
    if (*predict) return run_predict(predict_args);
  } catch (const jobml::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
