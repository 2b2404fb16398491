#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "jobml/error.hpp"

namespace jobml {

// Dense row-major tensor. Rank 1..3 is what the network needs; the shape is
// kept as a vector so shapes can be reported verbatim in errors.
template <typename S>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(checked_numel(shape_), S(0)) {}

  Tensor(std::vector<std::size_t> shape, std::vector<S> values)
      : shape_(std::move(shape)), data_(std::move(values)) {
    if (checked_numel(shape_) != data_.size())
      throw DimensionError("tensor shape " + shape_to_string(shape_) + " does not hold " +
                           std::to_string(data_.size()) + " values");
  }

  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<std::size_t> shape, S value) {
    Tensor t(std::move(shape));
    for (auto& v : t.data_) v = value;
    return t;
  }

  static Tensor scalar(S value) { return Tensor({1}, {value}); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }
  std::vector<S>& values() { return data_; }
  const std::vector<S>& values() const { return data_; }

  S& operator[](std::size_t i) { return data_[i]; }
  S operator[](std::size_t i) const { return data_[i]; }

  S& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  S at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  S& at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  S at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  bool all_finite() const {
    for (const S v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  std::string shape_str() const { return shape_to_string(shape_); }

  static std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }

 private:
  static std::size_t checked_numel(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw DimensionError("tensor shape must have at least one dimension");
    std::size_t n = 1;
    for (const std::size_t d : shape) {
      if (d == 0) throw DimensionError("tensor shape " + shape_to_string(shape) + " has a zero dimension");
      n *= d;
    }
    return n;
  }

  std::vector<std::size_t> shape_;
  std::vector<S> data_;
};

template <typename S>
void require_same_shape(const Tensor<S>& a, const Tensor<S>& b, const char* op) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace jobml
