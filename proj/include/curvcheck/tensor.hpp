#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace curvcheck {

/// Dense rank-R array over a chart of dimension n, stored row-major
/// (the first index varies slowest).
template <std::size_t Rank>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::size_t dim) : dim_(dim), data_(size_for(dim), 0.0) {}

  std::size_t dim() const { return dim_; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  template <typename... I>
    requires(sizeof...(I) == Rank)
  double& operator()(I... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  template <typename... I>
    requires(sizeof...(I) == Rank)
  double operator()(I... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = v < 0 ? (-v > m ? -v : m) : (v > m ? v : m);
    return m;
  }

  /// Largest componentwise |a - b|.
  friend double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
      const double d = a.data_[i] > b.data_[i] ? a.data_[i] - b.data_[i] : b.data_[i] - a.data_[i];
      if (d > m) m = d;
    }
    return m;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  static std::size_t size_for(std::size_t dim) {
    std::size_t s = 1;
    for (std::size_t r = 0; r < Rank; ++r) s *= dim;
    return s;
  }

  std::size_t offset(const std::array<std::size_t, Rank>& idx) const {
    std::size_t off = 0;
    for (std::size_t r = 0; r < Rank; ++r) off = off * dim_ + idx[r];
    return off;
  }

  std::size_t dim_ = 0;
  std::vector<double> data_;
};

using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

}  // namespace curvcheck
