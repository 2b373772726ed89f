#include "otcert/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otcert {

Box::Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.empty()) throw std::invalid_argument("box bounds must have equal nonzero length");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw std::invalid_argument("box needs lower < upper on every axis");
  }
}

double Box::diameter() const { return diameter_of_first(dim()); }

double Box::diameter_of_first(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(k, dim()); ++i) {
    const double w = upper[i] - lower[i];
    s += w * w;
  }
  return std::sqrt(s);
}

bool Box::contains(std::span<const double> p) const {
  if (p.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(p[i] >= lower[i] && p[i] <= upper[i])) return false;
  }
  return true;
}

void Box::clamp(std::span<double> p) const {
  for (std::size_t i = 0; i < std::min(p.size(), dim()); ++i) p[i] = std::clamp(p[i], lower[i], upper[i]);
}

bool Partition::member(const Box& box, std::span<const double> x) const {
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (x[i] < box.lower[i]) return false;
    if (x[i] < box.upper[i]) continue;
    if (!(x[i] == box.upper[i] && box.upper[i] == domain_.upper[i])) return false;
  }
  return true;
}

std::optional<std::size_t> Partition::locate_in_input(std::span<const double> x) const {
  if (!domain_.contains(x)) return std::nullopt;
  if (!grid_edges_.empty()) {
    std::size_t index = 0;
    for (std::size_t a = 0; a < grid_edges_.size(); ++a) {
      const auto& edges = grid_edges_[a];
      const std::size_t m = edges.size() - 1;
      auto it = std::upper_bound(edges.begin(), edges.end(), x[a]);
      std::size_t j = static_cast<std::size_t>(it - edges.begin());
      j = (j == 0) ? 0 : j - 1;
      if (j >= m) j = m - 1;
      index = index * m + j;
    }
    return index;
  }
  for (std::size_t i = 0; i < base_cells_; ++i) {
    if (member(cells_[i].box, x)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Partition::locate(std::span<const double> p) const {
  if (p.size() != point_dim()) return std::nullopt;
  if (!paired_) return locate_in_input(p);
  const double label = p.back();
  if (label != 1.0 && label != -1.0) return std::nullopt;
  auto i = locate_in_input(p.first(domain_.dim()));
  if (!i) return std::nullopt;
  return label > 0 ? *i + base_cells_ : *i;
}

std::vector<std::size_t> Partition::face_neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  const Box& b = cells_.at(i).box;
  const std::size_t offset = paired_ && i >= base_cells_ ? base_cells_ : 0;
  for (std::size_t j = offset; j < offset + base_cells_; ++j) {
    if (j == i) continue;
    const Box& c = cells_[j].box;
    std::size_t touching = 0;
    bool overlapping = true;
    for (std::size_t a = 0; a < b.dim(); ++a) {
      const double lo = std::max(b.lower[a], c.lower[a]);
      const double hi = std::min(b.upper[a], c.upper[a]);
      if (hi > lo) continue;
      if (hi == lo) {
        ++touching;
      } else {
        overlapping = false;
        break;
      }
    }
    if (overlapping && touching == 1) out.push_back(j);
  }
  return out;
}

double Partition::max_diameter() const {
  double m = 0.0;
  for (const auto& c : cells_) m = std::max(m, c.diameter);
  return m;
}

std::size_t Partition::total_count() const {
  std::size_t s = 0;
  for (const auto& c : cells_) s += c.count;
  return s;
}

namespace {

Cell make_cell(Box box, std::size_t input_dim) {
  Cell c;
  c.diameter = box.diameter();
  c.input_projection_diameter = box.diameter_of_first(input_dim);
  c.box = std::move(box);
  return c;
}

}  // namespace

Partition build_grid_partition(const Box& domain, std::span<const std::size_t> cells_per_dim,
                               std::optional<std::size_t> input_dim) {
  if (cells_per_dim.size() != domain.dim()) throw std::invalid_argument("cells_per_dim must match the domain dimension");
  for (auto m : cells_per_dim) {
    if (m == 0) throw std::invalid_argument("cells_per_dim entries must be positive");
  }
  Partition p;
  p.domain_ = domain;
  p.input_dim_ = input_dim.value_or(domain.dim());
  if (p.input_dim_ == 0 || p.input_dim_ > domain.dim()) throw std::invalid_argument("input_dim out of range");

  for (std::size_t a = 0; a < domain.dim(); ++a) {
    const std::size_t m = cells_per_dim[a];
    std::vector<double> edges(m + 1);
    const double lo = domain.lower[a], hi = domain.upper[a];
    for (std::size_t j = 0; j <= m; ++j) edges[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m);
    edges[0] = lo;
    edges[m] = hi;
    p.grid_edges_.push_back(std::move(edges));
  }

  std::size_t total = 1;
  for (auto m : cells_per_dim) total *= m;
  p.cells_.reserve(total);
  std::vector<std::size_t> idx(domain.dim(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    // Row-major: the last axis varies fastest, matching locate_in_input.
    std::size_t rem = flat;
    for (std::size_t a = domain.dim(); a-- > 0;) {
      idx[a] = rem % cells_per_dim[a];
      rem /= cells_per_dim[a];
    }
    std::vector<double> lo(domain.dim()), hi(domain.dim());
    for (std::size_t a = 0; a < domain.dim(); ++a) {
      lo[a] = p.grid_edges_[a][idx[a]];
      hi[a] = p.grid_edges_[a][idx[a] + 1];
    }
    p.cells_.push_back(make_cell(Box(std::move(lo), std::move(hi)), p.input_dim_));
  }
  p.base_cells_ = p.cells_.size();
  return p;
}

Partition build_paired_partition(const Partition& input) {
  if (input.paired_) throw std::invalid_argument("partition is already paired");
  if (input.input_dim_ != input.domain_.dim())
    throw std::invalid_argument("paired partitions are built from partitions of the input space only");
  Partition p;
  p.domain_ = input.domain_;
  p.input_dim_ = input.input_dim_;
  p.paired_ = true;
  p.grid_edges_ = input.grid_edges_;
  p.base_cells_ = input.cells_.size();
  p.cells_.reserve(2 * p.base_cells_);
  for (LabelSlice slice : {LabelSlice::Minus, LabelSlice::Plus}) {
    for (const auto& c : input.cells_) {
      Cell copy = make_cell(c.box, p.input_dim_);
      copy.label_slice = slice;
      p.cells_.push_back(std::move(copy));
    }
  }
  return p;
}

std::uint64_t divergence_strip_count(std::uint64_t n) {
  if (n == 0) return 0;
  // Smallest D with D^5 >= N^3.
  using u128 = unsigned __int128;
  const u128 target = static_cast<u128>(n) * n * n;
  auto fifth = [](std::uint64_t d) {
    u128 v = d;
    return v * d * d * d * d;
  };
  std::uint64_t d = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), 0.6)));
  d = std::max<std::uint64_t>(d, 1);
  while (d > 1 && fifth(d - 1) >= target) --d;
  while (fifth(d) < target) ++d;
  return d;
}

Partition build_divergence_partition(std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("the strip construction needs N >= 2");
  const std::uint64_t strips = divergence_strip_count(n);
  const double dn = static_cast<double>(strips);
  auto edge = [&](std::uint64_t j) { return j == strips ? 1.0 : static_cast<double>(j) / dn; };

  Partition p;
  p.domain_ = Box({0.0, 0.0}, {1.0, 1.0});
  p.input_dim_ = 1;
  for (std::uint64_t j = 0; j + 1 < strips; ++j) {
    p.cells_.push_back(make_cell(Box({edge(j), 0.0}, {edge(j + 1), 1.0}), 1));
  }
  for (std::uint64_t m = 0; m < strips; ++m) {
    p.cells_.push_back(make_cell(Box({edge(strips - 1), edge(m)}, {1.0, edge(m + 1)}), 1));
  }
  p.base_cells_ = p.cells_.size();
  return p;
}

std::vector<std::size_t> assign_cells(const Partition& partition, const Points& samples) {
  std::vector<std::size_t> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto c = partition.locate(samples[i]);
    if (!c) throw std::out_of_range("sample " + std::to_string(i) + " lies outside the partition domain");
    out[i] = *c;
  }
  return out;
}

Partition assign_counts(Partition partition, const Points& samples) {
  if (!samples.empty() && samples.dim() != partition.point_dim())
    throw std::invalid_argument("sample dimension does not match the partition");
  const auto cells = assign_cells(partition, samples);
  for (auto& c : partition.cells()) c.count = 0;
  for (auto c : cells) ++partition.cells()[c].count;
  return partition;
}

}  // namespace otcert
