#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace skelemotion {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major 3D array. The first index is outermost, the last innermost.
// Used for chain matrices (chain x frame x axis) and images (row x column x channel).
template <class T>
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t d0, std::size_t d1, std::size_t d2, T fill = T{})
      : dims_{d0, d1, d2}, data_(d0 * d1 * d2, fill) {}

  std::size_t dim0() const { return dims_[0]; }
  std::size_t dim1() const { return dims_[1]; }
  std::size_t dim2() const { return dims_[2]; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    assert(i < dims_[0] && j < dims_[1] && k < dims_[2]);
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    assert(i < dims_[0] && j < dims_[1] && k < dims_[2]);
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

  bool same_shape(const Array3& other) const {
    return dims_[0] == other.dims_[0] && dims_[1] == other.dims_[1] &&
           dims_[2] == other.dims_[2];
  }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  std::size_t dims_[3] = {0, 0, 0};
  std::vector<T> data_;
};

}  // namespace skelemotion
