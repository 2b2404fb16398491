#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "jobml/tensor.hpp"

using jobml::DimensionError;
using jobml::Tensor;

TEST_CASE("shape and element count", "[tensor]") {
  const Tensor<float> t({2, 3});
  REQUIRE(t.rank() == 2);
  REQUIRE(t.dim(0) == 2);
  REQUIRE(t.dim(1) == 3);
  REQUIRE(t.numel() == 6);
  for (std::size_t i = 0; i < t.numel(); ++i) REQUIRE(t[i] == 0.0f);
}

TEST_CASE("row-major indexing", "[tensor]") {
  Tensor<double> t({2, 3}, {1, 2, 3, 4, 5, 6});
  REQUIRE(t.at(0, 0) == 1.0);
  REQUIRE(t.at(0, 2) == 3.0);
  REQUIRE(t.at(1, 0) == 4.0);
  REQUIRE(t.at(1, 2) == 6.0);
  t.at(1, 1) = 50.0;
  REQUIRE(t[4] == 50.0);

  Tensor<double> u({2, 2, 2}, {0, 1, 2, 3, 4, 5, 6, 7});
  REQUIRE(u.at(0, 0, 0) == 0.0);
  REQUIRE(u.at(0, 1, 1) == 3.0);
  REQUIRE(u.at(1, 0, 1) == 5.0);
  REQUIRE(u.at(1, 1, 1) == 7.0);
}

TEST_CASE("shape and value count must agree", "[tensor]") {
  REQUIRE_THROWS_AS((Tensor<float>({2, 2}, {1.0f, 2.0f, 3.0f})), DimensionError);
}

TEST_CASE("degenerate shapes are rejected", "[tensor]") {
  REQUIRE_THROWS_AS(Tensor<float>(std::vector<std::size_t>{}), DimensionError);
  REQUIRE_THROWS_AS((Tensor<float>({2, 0})), DimensionError);
}

TEST_CASE("factories", "[tensor]") {
  const auto z = Tensor<float>::zeros({3});
  REQUIRE(z.numel() == 3);
  const auto f = Tensor<float>::full({2, 2}, 1.5f);
  for (std::size_t i = 0; i < 4; ++i) REQUIRE(f[i] == 1.5f);
  const auto s = Tensor<float>::scalar(7.0f);
  REQUIRE(s.numel() == 1);
  REQUIRE(s[0] == 7.0f);
}

TEST_CASE("shape rendering", "[tensor]") {
  REQUIRE(Tensor<float>({2, 3}).shape_str() == "[2x3]");
  REQUIRE(Tensor<float>({5}).shape_str() == "[5]");
  REQUIRE(Tensor<float>({1, 2, 3}).shape_str() == "[1x2x3]");
}

TEST_CASE("same-shape requirement names both shapes", "[tensor]") {
  const Tensor<float> a({2, 3});
  const Tensor<float> b({3, 2});
  try {
    jobml::require_same_shape(a, b, "op");
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("[2x3]") != std::string::npos);
    REQUIRE(msg.find("[3x2]") != std::string::npos);
  }
}

TEST_CASE("finite detection", "[tensor]") {
  Tensor<float> t({2}, {1.0f, 2.0f});
  REQUIRE(t.all_finite());
  t[1] = std::numeric_limits<float>::quiet_NaN();
  REQUIRE(!t.all_finite());
  t[1] = std::numeric_limits<float>::infinity();
  REQUIRE(!t.all_finite());
}
