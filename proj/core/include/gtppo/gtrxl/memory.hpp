#pragma once

#include <random>
#include <span>
#include <vector>

#include "gtppo/netcore/tensor.hpp"

namespace gtppo::gtrxl {

// Sliding per-block window of past block inputs for one environment. Rows are
// ordered oldest first; pushing a row evicts the oldest. At episode start the
// window is filled with Gaussian noise and the fill count is zero.
//
// The window also carries the key/value projections of its rows, valid for
// the parameter version recorded in `cache_version`.
template <typename T>
class MemoryWindow {
 public:
  MemoryWindow() = default;
  MemoryWindow(int n_blocks, int length, int d)
      : length_(length), d_(d), rows_(n_blocks, netcore::BasicTensor<T>::matrix(length, d)) {}

  template <typename Rng>
  void reset(Rng& rng, double sigma) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& r : rows_) {
      for (auto& v : r.values()) v = static_cast<T>(sigma > 0.0 ? noise(rng) : 0.0);
    }
    fill_ = 0;
    cache_version = -1;
  }

  // Appends one row to block `b`'s window, evicting the oldest.
  void push(int b, std::span<const T> row) {
    auto& r = rows_[b];
    std::copy(r.data() + d_, r.data() + static_cast<std::size_t>(length_) * d_, r.data());
    std::copy(row.begin(), row.end(), r.data() + static_cast<std::size_t>(length_ - 1) * d_);
  }

  void advance() {
    if (fill_ < length_) ++fill_;
  }

  int n_blocks() const { return static_cast<int>(rows_.size()); }
  int length() const { return length_; }
  int dim() const { return d_; }
  int fill_count() const { return fill_; }
  const netcore::BasicTensor<T>& rows(int b) const { return rows_[b]; }
  const std::vector<netcore::BasicTensor<T>>& all_rows() const { return rows_; }

  // Cached projections, maintained by the model.
  std::vector<netcore::BasicTensor<T>> keys, values;
  long cache_version = -1;

 private:
  int length_ = 0;
  int d_ = 0;
  int fill_ = 0;
  std::vector<netcore::BasicTensor<T>> rows_;
};

}  // namespace gtppo::gtrxl
