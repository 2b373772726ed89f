#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace otcert {

/// Row-major cloud of points sharing one dimension.
class Points {
 public:
  Points() = default;
  explicit Points(std::size_t dim) : dim_(dim) {}
  Points(std::size_t dim, std::vector<double> flat);
  Points(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { data_.reserve(n * dim_); }

  const std::vector<double>& flat() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace otcert
