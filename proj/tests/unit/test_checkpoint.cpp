#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "jobml/checkpoint.hpp"
#include "jobml/model.hpp"
#include "support/gen.hpp"
#include "support/tmpdir.hpp"

using jobml::LabelCatalog;
using jobml::ModelConfig;
using jobml::ModelParams;
using jobml::Tensor;
using jobml::ValidationError;
using jobml::Vocabulary;
using testsupport::TempDir;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.vocab_size = 6;
  c.embed_dim = 3;
  c.max_len = 5;
  c.gru_units = 2;
  c.lstm_units = 2;
  c.conv_filters = 2;
  c.conv_kernel_widths = {2, 3};
  c.num_labels = 3;
  c.threshold = 0.35;
  c.batch_size = 7;
  c.epochs = 4;
  c.seed = 99;
  return c;
}

Vocabulary small_vocab() {
  Vocabulary v(2);
  v.add("kế");
  v.add("toán");
  v.add("bán");
  v.add("hàng");
  return v;  // size 6
}

LabelCatalog small_catalog() {
  LabelCatalog c;
  c.add_title("Role A");
  c.add_title("Role B");
  c.add_title("Role C");
  c.add_alias("RB", 1);
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& blob) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << blob;
}

template <typename S>
bool params_bitwise_equal(const ModelParams<S>& a, const ModelParams<S>& b) {
  std::vector<const Tensor<S>*> av, bv;
  a.for_each([&](const char*, const Tensor<S>& t) { av.push_back(&t); });
  b.for_each([&](const char*, const Tensor<S>& t) { bv.push_back(&t); });
  if (av.size() != bv.size()) return false;
  for (std::size_t i = 0; i < av.size(); ++i) {
    if (av[i]->shape() != bv[i]->shape()) return false;
    for (std::size_t j = 0; j < av[i]->numel(); ++j)
      if ((*av[i])[j] != (*bv[i])[j]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config json round-trips every field", "[checkpoint]") {
  const ModelConfig c = small_config();
  const ModelConfig back = jobml::config_from_json(jobml::config_to_json(c));
  REQUIRE(back.vocab_size == c.vocab_size);
  REQUIRE(back.embed_dim == c.embed_dim);
  REQUIRE(back.max_len == c.max_len);
  REQUIRE(back.gru_units == c.gru_units);
  REQUIRE(back.lstm_units == c.lstm_units);
  REQUIRE(back.conv_filters == c.conv_filters);
  REQUIRE(back.conv_kernel_widths == c.conv_kernel_widths);
  REQUIRE(back.num_labels == c.num_labels);
  REQUIRE(back.threshold == c.threshold);
  REQUIRE(back.batch_size == c.batch_size);
  REQUIRE(back.epochs == c.epochs);
  REQUIRE(back.seed == c.seed);
}

TEST_CASE("config json rejects malformed input", "[checkpoint]") {
  auto j = jobml::config_to_json(small_config());
  SECTION("missing field") {
    j.erase("max_len");
    REQUIRE_THROWS_AS(jobml::config_from_json(j), ValidationError);
  }
  SECTION("invalid value fails validation") {
    j["threshold"] = 1.5;
    REQUIRE_THROWS_AS(jobml::config_from_json(j), ValidationError);
  }
  SECTION("wrong type") {
    j["epochs"] = "twenty";
    REQUIRE_THROWS_AS(jobml::config_from_json(j), ValidationError);
  }
}

TEST_CASE("checkpoints round-trip bit for bit", "[checkpoint]") {
  TempDir dir;
  const ModelConfig c = small_config();
  const Vocabulary vocab = small_vocab();
  const LabelCatalog catalog = small_catalog();
  std::mt19937_64 rng(42);
  const Tensor<float> emb =
      testsupport::random_tensor<float>({c.vocab_size, c.embed_dim}, rng, -0.4f, 0.4f);
  const ModelParams<float> params = jobml::init_params(c, emb);

  const auto path = (dir.path() / "model.bin").string();
  jobml::save_checkpoint(params, c, vocab, catalog, path);
  const auto ckpt = jobml::load_checkpoint<float>(path);

  REQUIRE(params_bitwise_equal(ckpt.params, params));
  REQUIRE(ckpt.vocab == vocab);
  REQUIRE(ckpt.catalog == catalog);
  REQUIRE(ckpt.config.threshold == c.threshold);
  REQUIRE(ckpt.config.conv_kernel_widths == c.conv_kernel_widths);
  REQUIRE(ckpt.config.seed == c.seed);

  SECTION("forward outputs are bitwise identical after reload") {
    jobml::EncodedSequence seq;
    seq.indices = {2, 4, 3, 0, 0};
    seq.true_length = 3;
    const auto before = jobml::run_forward(seq, params, c);
    const auto after = jobml::run_forward(seq, ckpt.params, ckpt.config);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) REQUIRE(before[i] == after[i]);
  }

  SECTION("saving twice produces identical bytes") {
    const auto path2 = (dir.path() / "model2.bin").string();
    jobml::save_checkpoint(params, c, vocab, catalog, path2);
    REQUIRE(read_file(path) == read_file(path2));
    REQUIRE(!read_file(path).empty());
  }

  SECTION("double-precision parameters round-trip too") {
    const ModelParams<double> dparams =
        jobml::init_params(c, testsupport::random_tensor<double>({c.vocab_size, c.embed_dim},
                                                                 rng, -0.4, 0.4));
    const auto dpath = (dir.path() / "model64.bin").string();
    jobml::save_checkpoint(dparams, c, vocab, catalog, dpath);
    const auto dckpt = jobml::load_checkpoint<double>(dpath);
    REQUIRE(params_bitwise_equal(dckpt.params, dparams));
  }
}

TEST_CASE("corrupted checkpoints are rejected", "[checkpoint]") {
  TempDir dir;
  const ModelConfig c = small_config();
  const auto path = (dir.path() / "model.bin").string();
  jobml::save_checkpoint(
      jobml::init_params(c, Tensor<float>::zeros({c.vocab_size, c.embed_dim})), c,
      small_vocab(), small_catalog(), path);
  const std::string blob = read_file(path);

  SECTION("truncation at several byte counts") {
    for (const std::size_t keep :
         {std::size_t{0}, std::size_t{5}, std::size_t{12}, std::size_t{19}, std::size_t{40},
          blob.size() - 1}) {
      const auto cut = (dir.path() / "cut.bin").string();
      write_file(cut, blob.substr(0, keep));
      INFO("kept " << keep << " of " << blob.size() << " bytes");
      REQUIRE_THROWS_AS(jobml::load_checkpoint<float>(cut), jobml::RuntimeError);
    }
  }

  SECTION("wrong magic") {
    std::string bad = blob;
    bad[0] = 'X';
    const auto p = (dir.path() / "magic.bin").string();
    write_file(p, bad);
    REQUIRE_THROWS_AS(jobml::load_checkpoint<float>(p), ValidationError);
  }

  SECTION("future format version names both versions") {
    std::string bad = blob;
    bad[8] = 2;  // little-endian u32 version field
    const auto p = (dir.path() / "version.bin").string();
    write_file(p, bad);
    try {
      jobml::load_checkpoint<float>(p);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      REQUIRE(msg.find("version 2") != std::string::npos);
      REQUIRE(msg.find("version 1") != std::string::npos);
    }
  }

  SECTION("scalar width mismatch") {
    REQUIRE_THROWS_AS(jobml::load_checkpoint<double>(path), ValidationError);
  }

  SECTION("missing file") {
    REQUIRE_THROWS_AS(jobml::load_checkpoint<float>((dir.path() / "nope.bin").string()),
                      ValidationError);
  }
}

TEST_CASE("saving validates the catalog and vocabulary sizes", "[checkpoint]") {
  TempDir dir;
  const ModelConfig c = small_config();
  const ModelParams<float> params =
      jobml::init_params(c, Tensor<float>::zeros({c.vocab_size, c.embed_dim}));
  const auto path = (dir.path() / "model.bin").string();

  LabelCatalog big = small_catalog();
  big.add_title("Role D");
  REQUIRE_THROWS_AS(jobml::save_checkpoint(params, c, small_vocab(), big, path),
                    ValidationError);

  Vocabulary tiny(1);
  REQUIRE_THROWS_AS(jobml::save_checkpoint(params, c, tiny, small_catalog(), path),
                    ValidationError);
}
