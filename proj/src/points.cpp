#include "otcert/points.hpp"

#include <stdexcept>

namespace otcert {

Points::Points(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) throw std::invalid_argument("flat point buffer does not match dimension");
}

Points::Points(std::initializer_list<std::initializer_list<double>> rows) {
  for (const auto& r : rows) {
    if (dim_ == 0) dim_ = r.size();
    if (r.size() != dim_ || dim_ == 0) throw std::invalid_argument("points must share a nonzero dimension");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void Points::push_back(std::span<const double> p) {
  if (dim_ == 0) dim_ = p.size();
  if (p.size() != dim_) throw std::invalid_argument("point dimension mismatch");
  data_.insert(data_.end(), p.begin(), p.end());
}

}  // namespace otcert
