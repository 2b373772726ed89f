#pragma once

// Primal network simplex for the uncapacitated transportation problem on the
// complete bipartite graph. Spanning tree kept as parent pointers plus child
// lists; entering arcs by block search, leaving arcs by the strongly feasible
// (last blocking arc) rule, which prevents cycling under degeneracy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace otcert::detail {

template <class F>
class TransportSimplex {
 public:
  // cost is row-major n_src x n_dst.
  TransportSimplex(std::vector<F> supply, std::vector<F> demand, const std::vector<double>& cost)
      : n_src_(supply.size()), n_dst_(demand.size()), cost_(cost) {
    if (cost_.size() != n_src_ * n_dst_) throw std::invalid_argument("cost matrix has the wrong size");
    nodes_ = n_src_ + n_dst_;
    root_ = nodes_;
    arcs_ = n_src_ * n_dst_;

    supply_.resize(nodes_);
    for (std::size_t i = 0; i < n_src_; ++i) supply_[i] = supply[i];
    for (std::size_t j = 0; j < n_dst_; ++j) supply_[n_src_ + j] = -demand[j];

    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
    art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);
    eps_ = 1e-13 * (max_cost + 1.0);

    flow_.assign(arcs_ + nodes_, F(0));
    state_.assign(arcs_, kLower);
    parent_.assign(nodes_ + 1, kNone);
    pred_.assign(nodes_ + 1, kNone);
    dir_.assign(nodes_ + 1, 0);
    depth_.assign(nodes_ + 1, 0);
    pi_.assign(nodes_ + 1, 0.0);
    first_child_.assign(nodes_ + 1, kNone);
    next_sib_.assign(nodes_ + 1, kNone);
    prev_sib_.assign(nodes_ + 1, kNone);
    art_cost_of_.assign(nodes_, 0.0);
    art_up_.assign(nodes_, true);

    for (std::size_t u = 0; u < nodes_; ++u) {
      const std::size_t e = arcs_ + u;
      attach(u, root_);
      pred_[u] = e;
      depth_[u] = 1;
      if (supply_[u] >= F(0)) {
        dir_[u] = kUp;  // u -> root
        art_up_[u] = true;
        art_cost_of_[u] = 0.0;
        flow_[e] = supply_[u];
        pi_[u] = 0.0;
      } else {
        dir_[u] = kDown;  // root -> u
        art_up_[u] = false;
        art_cost_of_[u] = art_cost_;
        flow_[e] = -supply_[u];
        pi_[u] = art_cost_;
      }
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(arcs_))));
  }

  void run() {
    for (;;) {
      if (!find_entering()) {
        // Refresh potentials from the tree before declaring optimality.
        recompute_potentials();
        if (!find_entering()) break;
      }
      pivot();
    }
  }

  F flow(std::size_t i, std::size_t j) const { return flow_[i * n_dst_ + j]; }
  /// Largest mass left on an artificial arc; zero for balanced problems.
  F artificial_residual() const {
    F m = F(0);
    for (std::size_t u = 0; u < nodes_; ++u) {
      if (!art_up_[u]) m = std::max(m, flow_[arcs_ + u]);
    }
    return m;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  static constexpr std::int8_t kLower = 1;
  static constexpr std::int8_t kTree = 0;
  static constexpr int kUp = 1;
  static constexpr int kDown = -1;

  std::size_t src(std::size_t e) const { return e < arcs_ ? e / n_dst_ : (art_up_[e - arcs_] ? e - arcs_ : root_); }
  std::size_t dst(std::size_t e) const {
    return e < arcs_ ? n_src_ + e % n_dst_ : (art_up_[e - arcs_] ? root_ : e - arcs_);
  }
  double arc_cost(std::size_t e) const { return e < arcs_ ? cost_[e] : art_cost_of_[e - arcs_]; }
  double reduced(std::size_t e) const { return arc_cost(e) + pi_[src(e)] - pi_[dst(e)]; }

  void attach(std::size_t u, std::size_t p) {
    parent_[u] = p;
    prev_sib_[u] = kNone;
    next_sib_[u] = first_child_[p];
    if (first_child_[p] != kNone) prev_sib_[first_child_[p]] = u;
    first_child_[p] = u;
  }

  void detach(std::size_t u) {
    const std::size_t p = parent_[u];
    if (prev_sib_[u] != kNone) {
      next_sib_[prev_sib_[u]] = next_sib_[u];
    } else {
      first_child_[p] = next_sib_[u];
    }
    if (next_sib_[u] != kNone) prev_sib_[next_sib_[u]] = prev_sib_[u];
    prev_sib_[u] = next_sib_[u] = kNone;
  }

  bool find_entering() {
    double best = -eps_;
    std::size_t best_arc = kNone;
    std::size_t scanned = 0;
    std::size_t e = next_arc_;
    const double* pi_dst = pi_.data() + n_src_;
    while (scanned < arcs_) {
      // Scan one block, row segment by row segment.
      std::size_t left = std::min(block_, arcs_ - scanned);
      scanned += left;
      while (left > 0) {
        const std::size_t i = e / n_dst_;
        const std::size_t j0 = e - i * n_dst_;
        const std::size_t len = std::min(left, n_dst_ - j0);
        const double* row = cost_.data() + i * n_dst_;
        const double shift = pi_[i];
        for (std::size_t j = j0; j < j0 + len; ++j) {
          const double c = row[j] + shift - pi_dst[j];
          if (c < best && state_[i * n_dst_ + j] == kLower) {
            best = c;
            best_arc = i * n_dst_ + j;
          }
        }
        left -= len;
        e += len;
        if (e == arcs_) e = 0;
      }
      if (best_arc != kNone) {
        next_arc_ = e;
        in_arc_ = best_arc;
        return true;
      }
    }
    return false;
  }

  void pivot() {
    const std::size_t first = src(in_arc_);
    const std::size_t second = dst(in_arc_);

    // Join node.
    std::size_t a = first, b = second;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = parent_[a];
      } else if (depth_[b] > depth_[a]) {
        b = parent_[b];
      } else {
        a = parent_[a];
        b = parent_[b];
      }
    }
    const std::size_t join = a;

    // Leaving arc: flow travels join -> first -> second -> join.
    bool bounded = false;
    F delta{};
    std::size_t u_out = kNone;
    int side = 0;
    for (std::size_t u = first; u != join; u = parent_[u]) {
      if (dir_[u] == kUp) {
        const F d = flow_[pred_[u]];
        if (!bounded || d < delta) {
          delta = d;
          u_out = u;
          side = 1;
          bounded = true;
        }
      }
    }
    for (std::size_t u = second; u != join; u = parent_[u]) {
      if (dir_[u] == kDown) {
        const F d = flow_[pred_[u]];
        if (!bounded || d <= delta) {
          delta = d;
          u_out = u;
          side = 2;
          bounded = true;
        }
      }
    }
    if (!bounded) throw std::runtime_error("transport problem is unbounded");

    if (delta > F(0)) {
      flow_[in_arc_] += delta;
      for (std::size_t u = first; u != join; u = parent_[u]) {
        if (dir_[u] == kUp) {
          flow_[pred_[u]] -= delta;
        } else {
          flow_[pred_[u]] += delta;
        }
      }
      for (std::size_t u = second; u != join; u = parent_[u]) {
        if (dir_[u] == kUp) {
          flow_[pred_[u]] += delta;
        } else {
          flow_[pred_[u]] -= delta;
        }
      }
    }

    const std::size_t out_arc = pred_[u_out];
    const std::size_t u_in = side == 1 ? first : second;
    const std::size_t v_in = side == 1 ? second : first;
    const double rc = reduced(in_arc_);
    const double sigma = (u_in == first) ? -rc : rc;

    // Re-hang the subtree of u_out from u_in, reversing the path u_in..u_out.
    path_.clear();
    for (std::size_t u = u_in;; u = parent_[u]) {
      path_.push_back(u);
      if (u == u_out) break;
    }
    saved_pred_.resize(path_.size());
    saved_dir_.resize(path_.size());
    for (std::size_t i = 0; i < path_.size(); ++i) {
      saved_pred_[i] = pred_[path_[i]];
      saved_dir_[i] = dir_[path_[i]];
    }
    for (std::size_t i = path_.size(); i-- > 0;) detach(path_[i]);

    attach(u_in, v_in);
    pred_[u_in] = in_arc_;
    dir_[u_in] = (u_in == first) ? kUp : kDown;
    for (std::size_t i = 1; i < path_.size(); ++i) {
      attach(path_[i], path_[i - 1]);
      pred_[path_[i]] = saved_pred_[i - 1];
      dir_[path_[i]] = -saved_dir_[i - 1];
    }

    state_[in_arc_] = kTree;
    if (out_arc < arcs_) state_[out_arc] = kLower;

    // Shift potentials and depths over the moved subtree.
    stack_.clear();
    stack_.push_back(u_in);
    while (!stack_.empty()) {
      const std::size_t u = stack_.back();
      stack_.pop_back();
      pi_[u] += sigma;
      depth_[u] = depth_[parent_[u]] + 1;
      for (std::size_t c = first_child_[u]; c != kNone; c = next_sib_[c]) stack_.push_back(c);
    }
  }

  void recompute_potentials() {
    stack_.clear();
    pi_[root_] = 0.0;
    depth_[root_] = 0;
    for (std::size_t c = first_child_[root_]; c != kNone; c = next_sib_[c]) stack_.push_back(c);
    while (!stack_.empty()) {
      const std::size_t u = stack_.back();
      stack_.pop_back();
      const std::size_t e = pred_[u];
      const std::size_t p = parent_[u];
      // Tree arcs have zero reduced cost: cost + pi[src] - pi[dst] = 0.
      pi_[u] = dir_[u] == kUp ? pi_[p] - arc_cost(e) : pi_[p] + arc_cost(e);
      depth_[u] = depth_[p] + 1;
      for (std::size_t c = first_child_[u]; c != kNone; c = next_sib_[c]) stack_.push_back(c);
    }
  }

  std::size_t n_src_, n_dst_, nodes_ = 0, root_ = 0, arcs_ = 0;
  const std::vector<double>& cost_;
  std::vector<F> supply_;
  double art_cost_ = 0.0;
  double eps_ = 0.0;

  std::vector<F> flow_;
  std::vector<std::int8_t> state_;
  std::vector<std::size_t> parent_, pred_;
  std::vector<int> dir_;
  std::vector<std::size_t> depth_;
  std::vector<double> pi_;
  std::vector<std::size_t> first_child_, next_sib_, prev_sib_;
  std::vector<double> art_cost_of_;
  std::vector<bool> art_up_;

  std::size_t block_ = 10;
  std::size_t next_arc_ = 0;
  std::size_t in_arc_ = 0;

  std::vector<std::size_t> path_, stack_, saved_pred_;
  std::vector<int> saved_dir_;
};

}  // namespace otcert::detail
