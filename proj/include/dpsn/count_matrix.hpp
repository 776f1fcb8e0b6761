#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dpsn {

// Dense row-major node x orbit count matrix.
class CountMatrix {
 public:
  CountMatrix() = default;
  CountMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::uint64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::uint64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const std::uint64_t> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const std::uint64_t> data() const noexcept { return data_; }

  CountMatrix& operator+=(const CountMatrix& other) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  bool operator==(const CountMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint64_t> data_;
};

// Graphlet degree vector matrix (dynamic or static) for one domain.
struct Gdvm {
  std::string id;
  CountMatrix counts;

  bool operator==(const Gdvm&) const = default;
};

}  // namespace dpsn
