#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "jobml/corpus.hpp"
#include "support/gen.hpp"
#include "support/tmpdir.hpp"

using Catch::Approx;
using jobml::JobRecord;
using jobml::LabelCatalog;
using jobml::LoadOptions;
using jobml::ValidationError;
using testsupport::TempDir;

TEST_CASE("builtin catalog has 68 titles in fixed order", "[corpus]") {
  const LabelCatalog cat = LabelCatalog::builtin();
  REQUIRE(cat.size() == 68);
  REQUIRE(cat.title(0) == "An Ninh / Bảo Vệ (Security)");
  REQUIRE(cat.title(10) == "CNTT - Phần mềm (IT - Software)");
  REQUIRE(cat.title(60) == "Tư vấn (Consulting)");
  REQUIRE(cat.title(67) == "Đồ gỗ (Wood)");
  // all titles resolve to their own index
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto found = cat.find(cat.title(i));
    REQUIRE(found.has_value());
    REQUIRE(*found == i);
  }
}

TEST_CASE("title lookup tolerates case and spacing differences", "[corpus]") {
  const LabelCatalog cat = LabelCatalog::builtin();
  REQUIRE(cat.find("cntt - phần mềm (it - software)") == std::size_t{10});
  REQUIRE(cat.find("  CNTT - Phần mềm (IT - Software)  ") == std::size_t{10});
  REQUIRE(cat.find("CNTT  -  Phần  mềm  (IT - Software)") == std::size_t{10});
  REQUIRE(cat.find("TƯ VẤN (CONSULTING)") == std::size_t{60});
  REQUIRE(!cat.find("Not A Real Title").has_value());
  REQUIRE(!cat.find("").has_value());
}

TEST_CASE("normalize_title resolves or throws", "[corpus]") {
  const LabelCatalog cat = LabelCatalog::builtin();
  REQUIRE(jobml::normalize_title("đồ gỗ (wood)", cat) == 67);
  REQUIRE_THROWS_AS(jobml::normalize_title("Quantum Plumber", cat), ValidationError);
  REQUIRE_THROWS_AS(jobml::normalize_title("   ", cat), ValidationError);
}

TEST_CASE("aliases resolve after canonical titles", "[corpus]") {
  LabelCatalog cat;
  cat.add_title("Alpha");
  cat.add_title("Beta");
  cat.add_alias("A", 0);
  cat.add_alias("second", 1);
  REQUIRE(cat.find("a") == std::size_t{0});
  REQUIRE(cat.find("SECOND") == std::size_t{1});
  REQUIRE(cat.find("Alpha") == std::size_t{0});  // canonical still wins
  REQUIRE_THROWS_AS(cat.add_alias("x", 5), ValidationError);
  REQUIRE_THROWS_AS(cat.add_title("alpha"), ValidationError);  // folded duplicate
}

TEST_CASE("catalog files parse titles and tab-separated aliases", "[corpus]") {
  TempDir dir;
  SECTION("plain and CRLF lines") {
    const auto path = dir.file("cat.tsv", "Alpha\tA\talef\r\nBeta\n\nGamma\tG\n");
    const LabelCatalog cat = jobml::load_catalog(path);
    REQUIRE(cat.size() == 3);
    REQUIRE(cat.title(1) == "Beta");
    REQUIRE(cat.find("alef") == std::size_t{0});
    REQUIRE(cat.find("g") == std::size_t{2});
  }
  SECTION("duplicate titles rejected") {
    const auto path = dir.file("dup.tsv", "Alpha\nalpha\n");
    REQUIRE_THROWS_AS(jobml::load_catalog(path), ValidationError);
  }
  SECTION("empty file rejected") {
    const auto path = dir.file("empty.tsv", "\n\n");
    REQUIRE_THROWS_AS(jobml::load_catalog(path), ValidationError);
  }
  SECTION("missing file rejected") {
    REQUIRE_THROWS_AS(jobml::load_catalog((dir.path() / "nope.tsv").string()), ValidationError);
  }
}

TEST_CASE("corpus loading accepts well-formed JSONL", "[corpus]") {
  TempDir dir;
  const LabelCatalog cat = LabelCatalog::builtin();
  const auto path = dir.file(
      "good.jsonl",
      R"x({"id":"a1","description":"tuyển lập trình viên","labels":["CNTT - Phần mềm (IT - Software)"],"language":"vi"})x"
      "\n"
      "\n"  // blank lines are skipped
      R"x({"id":"a2","description":"sales staff","labels":["Bán hàng / Kinh doanh (Sales / Business Development)","Tư vấn (Consulting)"],"language":"en"})x"
      "\n");
  const auto records = jobml::load_corpus(path, cat);
  REQUIRE(records.size() == 2);
  REQUIRE(records[0].id == "a1");
  REQUIRE(records[0].labels == std::set<std::size_t>{10});
  REQUIRE(records[0].language == "vi");
  REQUIRE(records[1].labels == std::set<std::size_t>{3, 60});
  REQUIRE(records[1].language == "en");
}

TEST_CASE("corpus loading reports the failing line number", "[corpus]") {
  TempDir dir;
  const LabelCatalog cat = LabelCatalog::builtin();
  const std::string ok =
      R"x({"id":"ok","description":"x","labels":["Tư vấn (Consulting)"]})x" "\n";

  const auto expect_line2 = [&](const std::string& name, const std::string& badline) {
    const auto path = dir.file(name, ok + badline + "\n");
    try {
      jobml::load_corpus(path, cat);
      FAIL("expected ValidationError for " + name);
    } catch (const ValidationError& e) {
      INFO(e.what());
      REQUIRE(std::string(e.what()).find(":2:") != std::string::npos);
    }
  };

  expect_line2("bad_json.jsonl", "{not json");
  expect_line2("no_id.jsonl", R"x({"description":"x","labels":["Tư vấn (Consulting)"]})x");
  expect_line2("no_desc.jsonl", R"x({"id":"b","labels":["Tư vấn (Consulting)"]})x");
  expect_line2("no_labels.jsonl", R"x({"id":"b","description":"x"})x");
  expect_line2("empty_id.jsonl", R"x({"id":"","description":"x","labels":["Tư vấn (Consulting)"]})x");
  expect_line2("empty_desc.jsonl", R"x({"id":"b","description":"  ","labels":["Tư vấn (Consulting)"]})x");
  expect_line2("empty_labels.jsonl", R"x({"id":"b","description":"x","labels":[]})x");
  expect_line2("dup_id.jsonl", R"x({"id":"ok","description":"x","labels":["Tư vấn (Consulting)"]})x");
  expect_line2("bad_lang.jsonl",
               R"x({"id":"b","description":"x","labels":["Tư vấn (Consulting)"],"language":"fr"})x");
  expect_line2("unknown_label.jsonl", R"x({"id":"b","description":"x","labels":["Mystery Role"]})x");
  expect_line2("nonstring_label.jsonl", R"x({"id":"b","description":"x","labels":[7]})x");
}

TEST_CASE("unknown labels can be skipped with a warning", "[corpus]") {
  TempDir dir;
  const LabelCatalog cat = LabelCatalog::builtin();
  const auto path = dir.file(
      "mixed.jsonl",
      R"x({"id":"keep","description":"x","labels":["Mystery Role","Tư vấn (Consulting)"]})x" "\n"
      R"x({"id":"drop","description":"x","labels":["Mystery Role"]})x" "\n");
  LoadOptions opts;
  opts.skip_unknown_labels = true;
  const auto report = jobml::load_corpus_report(path, cat, opts);
  REQUIRE(report.records.size() == 1);
  REQUIRE(report.records[0].id == "keep");
  REQUIRE(report.records[0].labels == std::set<std::size_t>{60});
  REQUIRE(report.skipped_records == 1);
  REQUIRE(report.warnings.size() == 1);
  REQUIRE(report.warnings[0].find("drop") != std::string::npos);
}

TEST_CASE("duplicate label strings collapse into one index", "[corpus]") {
  TempDir dir;
  const LabelCatalog cat = LabelCatalog::builtin();
  const auto path = dir.file(
      "dup_labels.jsonl",
      R"x({"id":"a","description":"x","labels":["Tư vấn (Consulting)","tư vấn (consulting)"]})x" "\n");
  const auto records = jobml::load_corpus(path, cat);
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].labels.size() == 1);
}

namespace {

std::vector<JobRecord> make_records(const std::string& prefix, std::size_t n) {
  std::vector<JobRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    JobRecord r;
    r.id = prefix + std::to_string(i);
    r.description = "desc " + std::to_string(i);
    r.labels = {i % 5};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

TEST_CASE("split carves floor(fraction * n) from each pool", "[corpus]") {
  const auto split = jobml::split_corpus(make_records("t", 103), make_records("e", 47), 0.1, 7);
  // floor(0.1 * 103) = 10 from train, floor(0.1 * 47) = 4 from test
  REQUIRE(split.dev.size() == 14);
  REQUIRE(split.train.size() == 93);
  REQUIRE(split.test.size() == 43);
}

TEST_CASE("split partitions records without loss or duplication", "[corpus]") {
  const auto split = jobml::split_corpus(make_records("t", 50), make_records("e", 20), 0.25, 99);
  std::set<std::string> ids;
  for (const auto* part : {&split.train, &split.dev, &split.test})
    for (const auto& r : *part) REQUIRE(ids.insert(r.id).second);
  REQUIRE(ids.size() == 70);
}

TEST_CASE("split keeps survivor order inside each pool", "[corpus]") {
  const auto split = jobml::split_corpus(make_records("t", 40), make_records("e", 10), 0.2, 3);
  const auto ordered = [](const std::vector<JobRecord>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      const int a = std::stoi(v[i - 1].id.substr(1));
      const int b = std::stoi(v[i].id.substr(1));
      if (a >= b) return false;
    }
    return true;
  };
  REQUIRE(ordered(split.train));
  REQUIRE(ordered(split.test));
}

TEST_CASE("split is deterministic in its seed", "[corpus]") {
  const auto ids_of = [](const std::vector<JobRecord>& v) {
    std::vector<std::string> out;
    for (const auto& r : v) out.push_back(r.id);
    return out;
  };
  const auto a = jobml::split_corpus(make_records("t", 60), make_records("e", 30), 0.15, 5);
  const auto b = jobml::split_corpus(make_records("t", 60), make_records("e", 30), 0.15, 5);
  const auto c = jobml::split_corpus(make_records("t", 60), make_records("e", 30), 0.15, 6);
  REQUIRE(ids_of(a.dev) == ids_of(b.dev));
  REQUIRE(ids_of(a.train) == ids_of(b.train));
  REQUIRE(ids_of(a.dev) != ids_of(c.dev));
}

TEST_CASE("split rejects bad fractions and overlapping ids", "[corpus]") {
  REQUIRE_THROWS_AS(jobml::split_corpus(make_records("t", 10), make_records("e", 5), 0.0, 1),
                    ValidationError);
  REQUIRE_THROWS_AS(jobml::split_corpus(make_records("t", 10), make_records("e", 5), 1.0, 1),
                    ValidationError);
  REQUIRE_THROWS_AS(jobml::split_corpus(make_records("t", 10), make_records("t", 5), 0.1, 1),
                    ValidationError);
}

TEST_CASE("stats match hand-computed values", "[corpus]") {
  std::vector<JobRecord> records(3);
  records[0] = {"a", "Lập trình", {1}, "vi"};           // 9 scalars
  records[1] = {"b", "hello", {2, 3}, "en"};            // 5 scalars
  records[2] = {"c", "xin chào", {4, 5, 6}, "vi"};      // 8 scalars
  const auto stats = jobml::compute_stats(records);
  REQUIRE(stats.count == 3);
  REQUIRE(stats.max_char_len == 9);
  REQUIRE(stats.mean_char_len == Approx(7.33));  // mean 22/3 rounded to 2 decimals
  REQUIRE(stats.single_label_count == 1);
  REQUIRE(stats.multi_label_count == 2);
  REQUIRE(stats.max_labels_per_record == 3);
  REQUIRE(stats.label_cardinality_histogram.at(1) == 1);
  REQUIRE(stats.label_cardinality_histogram.at(2) == 1);
  REQUIRE(stats.label_cardinality_histogram.at(3) == 1);
  REQUIRE(stats.per_language_counts.at("vi") == 2);
  REQUIRE(stats.per_language_counts.at("en") == 1);
}

TEST_CASE("stats reject an empty record list", "[corpus]") {
  REQUIRE_THROWS_AS(jobml::compute_stats({}), ValidationError);
}

TEST_CASE("histogram entries always total the corpus size", "[corpus]") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = testsupport::random_records(rng, 1 + trial * 7, 68);
    const auto stats = jobml::compute_stats(records);
    std::size_t total = 0;
    for (const auto& [card, n] : stats.label_cardinality_histogram) {
      REQUIRE(card >= 1);
      total += n;
    }
    REQUIRE(total == stats.count);
    REQUIRE(stats.single_label_count + stats.multi_label_count == stats.count);
  }
}

TEST_CASE("stats json carries every field", "[corpus]") {
  std::vector<JobRecord> records(2);
  records[0] = {"a", "abc", {1}, "vi"};
  records[1] = {"b", "defgh", {2, 3}, ""};
  const auto j = jobml::stats_to_json(jobml::compute_stats(records));
  REQUIRE(j["count"] == 2);
  REQUIRE(j["max_char_len"] == 5);
  REQUIRE(j["mean_char_len"] == Approx(4.0));
  REQUIRE(j["label_cardinality_histogram"]["1"] == 1);
  REQUIRE(j["label_cardinality_histogram"]["2"] == 1);
  REQUIRE(j["per_language_counts"]["vi"] == 1);
  REQUIRE(j["per_language_counts"].size() == 1);  // empty language not counted
}
