#include "otcert/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace otcert {

namespace {

constexpr std::size_t kChunk = 4096;

void check_mesh(const Box& domain, std::span<const std::size_t> mesh_per_dim) {
  if (mesh_per_dim.size() != domain.dim()) throw std::invalid_argument("mesh needs one resolution per axis");
  for (auto m : mesh_per_dim)
    if (m == 0) throw std::invalid_argument("mesh resolution must be positive");
}

double axis_value(const Box& b, std::size_t axis, std::size_t i, std::size_t m) {
  if (m == 1) return 0.5 * (b.lower[axis] + b.upper[axis]);
  if (i + 1 == m) return b.upper[axis];
  return b.lower[axis] + (b.upper[axis] - b.lower[axis]) * static_cast<double>(i) / static_cast<double>(m - 1);
}

// Max over `values` of cells with data, then fill empty cells from face
// neighbours until nothing changes.
void fill_empty(Partition& partition, std::vector<std::optional<double>>& values) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::optional<double>> next = values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i]) continue;
      std::optional<double> best;
      for (std::size_t j : partition.face_neighbors(i))
        if (values[j]) best = std::max(best.value_or(0.0), *values[j]);
      if (best) {
        next[i] = best;
        changed = true;
      }
    }
    values.swap(next);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) throw std::invalid_argument("mesh does not reach every connected group of cells");
    partition.cells()[i].local_lip = *values[i];
  }
}

}  // namespace

LabelGrid LabelGrid::linspace(double lo, double hi, std::size_t m) {
  if (m == 0) throw std::invalid_argument("label grid needs at least one value");
  if (!(lo <= hi)) throw std::invalid_argument("label interval is empty");
  Box b({lo}, {hi});
  LabelGrid g;
  for (std::size_t i = 0; i < m; ++i) g.values.push_back(lo == hi ? lo : axis_value(b, 0, i, m));
  return g;
}

LabelGrid LabelGrid::signs() { return {{-1.0, 1.0}}; }

std::vector<std::size_t> default_mesh(std::size_t input_dim) {
  if (input_dim == 1) return {512};
  return std::vector<std::size_t>(input_dim, 256);
}

Points uniform_mesh(const Box& domain, std::span<const std::size_t> mesh_per_dim) {
  check_mesh(domain, mesh_per_dim);
  const std::size_t d = domain.dim();
  std::size_t total = 1;
  for (auto m : mesh_per_dim) total *= m;
  Points out(d);
  out.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> p(d);
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t a = 0; a < d; ++a) p[a] = axis_value(domain, a, idx[a], mesh_per_dim[a]);
    out.push_back(p);
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < mesh_per_dim[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

GradField grad_norm_field(const MlpModel& model, const std::optional<LossKind>& loss, const Box& domain,
                          std::span<const std::size_t> mesh_per_dim, const std::optional<LabelGrid>& labels) {
  check_mesh(domain, mesh_per_dim);
  if (model.input_dim() != domain.dim()) throw std::invalid_argument("model input dimension does not match the domain");
  if (loss && !labels) throw std::invalid_argument("a loss-composed field needs a label grid");
  if (loss && loss->discrete_labels())
    for (double y : labels->values)
      if (y != 1.0 && y != -1.0) throw std::invalid_argument("label grid must be {-1, +1} for this loss");

  const Points mesh = uniform_mesh(domain, mesh_per_dim);
  const std::size_t d = domain.dim();
  GradField f;
  f.mesh_per_dim.assign(mesh_per_dim.begin(), mesh_per_dim.end());
  f.probed = loss ? Probed::LossComposed : Probed::PredictorOnly;
  f.mesh_points = Points(loss ? d + 1 : d);
  const std::size_t per_x = loss ? labels->values.size() : 1;
  f.mesh_points.reserve(mesh.size() * per_x);
  f.grad_norms.reserve(mesh.size() * per_x);

  std::vector<double> p(d + 1);
  for (std::size_t start = 0; start < mesh.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, mesh.size() - start);
    Eigen::Map<const Eigen::MatrixXd> in(mesh.flat().data() + start * d, static_cast<Eigen::Index>(d),
                                         static_cast<Eigen::Index>(len));
    const PredictorJet jet = mlp_jet(model, in);
    for (std::size_t i = 0; i < len; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      const double gx = jet.gradients.col(c).norm();
      if (!loss) {
        f.mesh_points.push_back(mesh[start + i]);
        f.grad_norms.push_back(gx);
        continue;
      }
      std::copy_n(mesh[start + i].begin(), d, p.begin());
      for (double y : labels->values) {
        p[d] = y;
        const double dp = loss_dprediction(*loss, jet.values(c), y);
        double g = std::abs(dp) * gx;
        if (!loss->discrete_labels()) g = std::hypot(g, loss_dtarget(*loss, jet.values(c), y));
        f.mesh_points.push_back(p);
        f.grad_norms.push_back(g);
      }
    }
  }
  return f;
}

GradField field_from_function(const Box& domain, std::span<const std::size_t> mesh_per_dim,
                              const std::function<double(std::span<const double>)>& grad_norm) {
  GradField f;
  f.mesh_points = uniform_mesh(domain, mesh_per_dim);
  f.mesh_per_dim.assign(mesh_per_dim.begin(), mesh_per_dim.end());
  f.grad_norms.reserve(f.mesh_points.size());
  for (std::size_t i = 0; i < f.mesh_points.size(); ++i) {
    const double g = grad_norm(f.mesh_points[i]);
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("gradient norms must be finite and nonnegative");
    f.grad_norms.push_back(g);
  }
  return f;
}

Partition local_lipschitz(const GradField& field, Partition partition) {
  if (field.size() == 0) throw std::invalid_argument("empty gradient field");
  if (field.mesh_points.size() != field.size()) throw std::invalid_argument("field points and norms differ in length");
  const std::size_t k = partition.size();
  std::vector<std::optional<double>> values(k);
  auto take = [&](std::size_t cell, double g) { values[cell] = std::max(values[cell].value_or(0.0), g); };

  const std::size_t fd = field.mesh_points.dim();
  if (fd == partition.point_dim()) {
    for (std::size_t i = 0; i < field.size(); ++i)
      if (auto c = partition.locate(field.mesh_points[i])) take(*c, field.grad_norms[i]);
  } else if (partition.paired() && fd == partition.input_dim()) {
    std::vector<double> p(fd + 1);
    for (std::size_t i = 0; i < field.size(); ++i) {
      std::copy_n(field.mesh_points[i].begin(), fd, p.begin());
      for (double y : {-1.0, 1.0}) {
        p[fd] = y;
        if (auto c = partition.locate(p)) take(*c, field.grad_norms[i]);
      }
    }
  } else if (fd == partition.input_dim()) {
    // Field constant along the label axes: group cells by input projection.
    std::map<std::vector<double>, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < k; ++c) {
      const Box& b = partition.cells()[c].box;
      std::vector<double> key(b.lower.begin(), b.lower.begin() + static_cast<std::ptrdiff_t>(fd));
      key.insert(key.end(), b.upper.begin(), b.upper.begin() + static_cast<std::ptrdiff_t>(fd));
      groups[key].push_back(c);
    }
    for (const auto& [key, members] : groups) {
      Box proj(std::vector<double>(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(fd)),
               std::vector<double>(key.begin() + static_cast<std::ptrdiff_t>(fd), key.end()));
      std::optional<double> best;
      for (std::size_t i = 0; i < field.size(); ++i)
        if (partition.member(proj, field.mesh_points[i])) best = std::max(best.value_or(0.0), field.grad_norms[i]);
      if (best)
        for (auto c : members) take(c, *best);
    }
  } else {
    throw std::invalid_argument("field dimension does not match the partition");
  }
  fill_empty(partition, values);
  return partition;
}

double global_lipschitz(const GradField& field) {
  if (field.size() == 0) throw std::invalid_argument("empty gradient field");
  return *std::max_element(field.grad_norms.begin(), field.grad_norms.end());
}

void write_field_csv(const GradField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::size_t d = field.mesh_points.dim();
  for (std::size_t a = 0; a < d; ++a) out << "x" << a << ',';
  out << "grad_norm\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (double v : field.mesh_points[i]) out << fmt::format("{:.17g},", v);
    out << fmt::format("{:.17g}\n", field.grad_norms[i]);
  }
}

}  // namespace otcert
