#include "gsw/detail/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gsw/error.hpp"

namespace gsw::detail {
namespace {

constexpr int kDirUp = 1;
constexpr int kDirDown = -1;
constexpr signed char kStateTree = 0;
constexpr signed char kStateLower = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReducedCostTol = 1e-13;

// Bipartite network: nodes [0, m) are sources, [m, m + n) sinks, m + n the
// artificial root. Arc e < m*n joins source e / n to sink m + e % n; arcs
// m*n + u are the artificial arcs between node u and the root.
class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand, const Matrix& cost)
      : m_(static_cast<int>(supply.size())),
        n_(static_cast<int>(demand.size())),
        node_num_(m_ + n_),
        arc_num_(static_cast<long>(m_) * n_),
        all_arc_num_(arc_num_ + node_num_),
        root_(node_num_) {
    cost_.resize(static_cast<std::size_t>(all_arc_num_));
    double max_cost = 0.0;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const double c = cost(i, j);
        cost_[static_cast<std::size_t>(static_cast<long>(i) * n_ + j)] = c;
        max_cost = std::max(max_cost, std::abs(c));
      }
    }
    art_cost_ = (max_cost + 1.0) * node_num_;

    const auto nodes = static_cast<std::size_t>(node_num_ + 1);
    supply_.resize(nodes);
    for (int i = 0; i < m_; ++i) supply_[static_cast<std::size_t>(i)] = supply[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_; ++j) supply_[static_cast<std::size_t>(m_ + j)] = -demand[static_cast<std::size_t>(j)];

    flow_.assign(static_cast<std::size_t>(all_arc_num_), 0.0);
    state_.assign(static_cast<std::size_t>(all_arc_num_), kStateLower);
    art_source_.resize(static_cast<std::size_t>(node_num_));
    art_target_.resize(static_cast<std::size_t>(node_num_));

    parent_.resize(nodes);
    pred_.resize(nodes);
    thread_.resize(nodes);
    rev_thread_.resize(nodes);
    succ_num_.resize(nodes);
    last_succ_.resize(nodes);
    pred_dir_.resize(nodes);
    pi_.resize(nodes);

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_num_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;

    for (int u = 0; u < node_num_; ++u) {
      const long e = arc_num_ + u;
      const auto su = static_cast<std::size_t>(u);
      parent_[su] = root_;
      pred_[su] = e;
      thread_[su] = u + 1;
      rev_thread_[static_cast<std::size_t>(u + 1)] = u;
      succ_num_[su] = 1;
      last_succ_[su] = u;
      state_[static_cast<std::size_t>(e)] = kStateTree;
      if (supply_[su] >= 0.0) {
        pred_dir_[su] = kDirUp;
        pi_[su] = 0.0;
        art_source_[su] = u;
        art_target_[su] = root_;
        flow_[static_cast<std::size_t>(e)] = supply_[su];
        cost_[static_cast<std::size_t>(e)] = 0.0;
      } else {
        pred_dir_[su] = kDirDown;
        pi_[su] = art_cost_;
        art_source_[su] = root_;
        art_target_[su] = u;
        flow_[static_cast<std::size_t>(e)] = -supply_[su];
        cost_[static_cast<std::size_t>(e)] = art_cost_;
      }
    }

    block_size_ = std::max<long>(10, static_cast<long>(std::ceil(std::sqrt(static_cast<double>(arc_num_)))));
  }

  std::size_t run(std::size_t max_iterations) {
    std::size_t iter = 0;
    while (find_entering_arc()) {
      if (max_iterations != 0 && ++iter > max_iterations) {
        throw Error(ErrorKind::solver_failure, "network simplex exceeded iteration limit");
      }
      find_join_node();
      if (!find_leaving_arc()) {
        throw Error(ErrorKind::solver_failure, "network simplex found an unbounded cycle");
      }
      change_flow();
      update_tree_structure();
      update_potential();
      ++iterations_;
    }
    return iterations_;
  }

  TransportSolution solution() const {
    TransportSolution out;
    out.flow.resize(m_, n_);
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const auto e = static_cast<std::size_t>(static_cast<long>(i) * n_ + j);
        out.flow(i, j) = flow_[e];
        total += flow_[e] * cost_[e];
      }
    }
    out.cost = total;
    // Reduced cost of arc (i, j) is cost + pi_i - pi_{m+j}; expose it as
    // cost - u_i - v_j.
    out.row_potential.resize(m_);
    out.col_potential.resize(n_);
    for (int i = 0; i < m_; ++i) out.row_potential(i) = -pi_[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_; ++j) out.col_potential(j) = pi_[static_cast<std::size_t>(m_ + j)];
    out.iterations = iterations_;
    return out;
  }

  double max_artificial_flow() const {
    double worst = 0.0;
    for (int u = 0; u < node_num_; ++u) {
      worst = std::max(worst, flow_[static_cast<std::size_t>(arc_num_ + u)]);
    }
    return worst;
  }

 private:
  int source(long e) const {
    return e < arc_num_ ? static_cast<int>(e / n_) : art_source_[static_cast<std::size_t>(e - arc_num_)];
  }
  int target(long e) const {
    return e < arc_num_ ? m_ + static_cast<int>(e % n_)
                        : art_target_[static_cast<std::size_t>(e - arc_num_)];
  }

  double reduced_cost(long e, int i, int j) const {
    return cost_[static_cast<std::size_t>(e)] + pi_[static_cast<std::size_t>(i)] -
           pi_[static_cast<std::size_t>(m_ + j)];
  }

  // Block search over the real arcs; artificial arcs never re-enter.
  bool find_entering_arc() {
    double min = 0.0;
    long cnt = block_size_;
    long e = next_arc_;
    for (long visited = 0; visited < arc_num_; ++visited) {
      if (state_[static_cast<std::size_t>(e)] == kStateLower) {
        const int i = static_cast<int>(e / n_);
        const int j = static_cast<int>(e % n_);
        const double c = reduced_cost(e, i, j);
        if (c < min) {
          const double scale = std::max({std::abs(cost_[static_cast<std::size_t>(e)]),
                                         std::abs(pi_[static_cast<std::size_t>(i)]),
                                         std::abs(pi_[static_cast<std::size_t>(m_ + j)])});
          if (c < -kReducedCostTol * scale) {
            min = c;
            in_arc_ = e;
          }
        }
      }
      if (++e == arc_num_) e = 0;
      if (--cnt == 0) {
        if (min < 0.0) break;
        cnt = block_size_;
      }
    }
    if (min >= 0.0) return false;
    next_arc_ = e;
    return true;
  }

  void find_join_node() {
    int u = source(in_arc_);
    int v = target(in_arc_);
    while (u != v) {
      if (succ_num_[static_cast<std::size_t>(u)] < succ_num_[static_cast<std::size_t>(v)]) {
        u = parent_[static_cast<std::size_t>(u)];
      } else {
        v = parent_[static_cast<std::size_t>(v)];
      }
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    first_ = source(in_arc_);
    second_ = target(in_arc_);
    delta_ = kInf;
    int result = 0;
    for (int u = first_; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto su = static_cast<std::size_t>(u);
      const double d = pred_dir_[su] == kDirUp ? flow_[static_cast<std::size_t>(pred_[su])] : kInf;
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (int u = second_; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto su = static_cast<std::size_t>(u);
      const double d = pred_dir_[su] == kDirDown ? flow_[static_cast<std::size_t>(pred_[su])] : kInf;
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first_;
      v_in_ = second_;
    } else {
      u_in_ = second_;
      v_in_ = first_;
    }
    return result != 0;
  }

  void change_flow() {
    if (delta_ > 0.0) {
      flow_[static_cast<std::size_t>(in_arc_)] += delta_;
      for (int u = source(in_arc_); u != join_; u = parent_[static_cast<std::size_t>(u)]) {
        const auto su = static_cast<std::size_t>(u);
        flow_[static_cast<std::size_t>(pred_[su])] -= pred_dir_[su] * delta_;
      }
      for (int u = target(in_arc_); u != join_; u = parent_[static_cast<std::size_t>(u)]) {
        const auto su = static_cast<std::size_t>(u);
        flow_[static_cast<std::size_t>(pred_[su])] += pred_dir_[su] * delta_;
      }
    }
    state_[static_cast<std::size_t>(in_arc_)] = kStateTree;
    const auto leaving = static_cast<std::size_t>(pred_[static_cast<std::size_t>(u_out_)]);
    state_[leaving] = kStateLower;
    flow_[leaving] = 0.0;
  }

  void update_tree_structure() {
    auto at = [](std::vector<int>& v, int i) -> int& { return v[static_cast<std::size_t>(i)]; };

    const int old_rev_thread = at(rev_thread_, u_out_);
    const int old_succ_num = at(succ_num_, u_out_);
    const int old_last_succ = at(last_succ_, u_out_);
    v_out_ = at(parent_, u_out_);

    if (u_in_ == u_out_) {
      at(parent_, u_in_) = v_in_;
      pred_[static_cast<std::size_t>(u_in_)] = in_arc_;
      at(pred_dir_, u_in_) = u_in_ == source(in_arc_) ? kDirUp : kDirDown;

      if (at(thread_, v_in_) != u_out_) {
        int after = at(thread_, old_last_succ);
        at(thread_, old_rev_thread) = after;
        at(rev_thread_, after) = old_rev_thread;
        after = at(thread_, v_in_);
        at(thread_, v_in_) = u_out_;
        at(rev_thread_, u_out_) = v_in_;
        at(thread_, old_last_succ) = after;
        at(rev_thread_, after) = old_last_succ;
      }
    } else {
      const int thread_continue =
          old_rev_thread == v_in_ ? at(thread_, old_last_succ) : at(thread_, v_in_);

      // Re-hang the stem between u_in and u_out under v_in.
      int stem = u_in_;
      int par_stem = v_in_;
      int last = at(last_succ_, u_in_);
      int after = at(thread_, last);
      at(thread_, v_in_) = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const int next_stem = at(parent_, stem);
        at(thread_, last) = next_stem;
        dirty_revs_.push_back(last);

        const int before = at(rev_thread_, stem);
        at(thread_, before) = after;
        at(rev_thread_, after) = before;

        at(parent_, stem) = par_stem;
        par_stem = stem;
        stem = next_stem;

        last = at(last_succ_, stem) == at(last_succ_, par_stem) ? at(rev_thread_, par_stem)
                                                                : at(last_succ_, stem);
        after = at(thread_, last);
      }
      at(parent_, u_out_) = par_stem;
      at(thread_, last) = thread_continue;
      at(rev_thread_, thread_continue) = last;
      at(last_succ_, u_out_) = last;

      if (old_rev_thread != v_in_) {
        at(thread_, old_rev_thread) = after;
        at(rev_thread_, after) = old_rev_thread;
      }

      for (int u : dirty_revs_) at(rev_thread_, at(thread_, u)) = u;

      int tmp_sc = 0;
      const int tmp_ls = at(last_succ_, u_out_);
      for (int u = u_out_, p = at(parent_, u); u != u_in_; u = p, p = at(parent_, u)) {
        pred_[static_cast<std::size_t>(u)] = pred_[static_cast<std::size_t>(p)];
        at(pred_dir_, u) = -at(pred_dir_, p);
        tmp_sc += at(succ_num_, u) - at(succ_num_, p);
        at(succ_num_, u) = tmp_sc;
        at(last_succ_, p) = tmp_ls;
      }
      pred_[static_cast<std::size_t>(u_in_)] = in_arc_;
      at(pred_dir_, u_in_) = u_in_ == source(in_arc_) ? kDirUp : kDirDown;
      at(succ_num_, u_in_) = old_succ_num;
    }

    const int up_limit_out = at(last_succ_, join_) == v_in_ ? join_ : -1;
    const int last_succ_out = at(last_succ_, u_out_);
    for (int u = v_in_; u != -1 && at(last_succ_, u) == v_in_; u = at(parent_, u)) {
      at(last_succ_, u) = last_succ_out;
    }

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && at(last_succ_, u) == old_last_succ; u = at(parent_, u)) {
        at(last_succ_, u) = old_rev_thread;
      }
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && at(last_succ_, u) == old_last_succ; u = at(parent_, u)) {
        at(last_succ_, u) = last_succ_out;
      }
    }

    for (int u = v_in_; u != join_; u = at(parent_, u)) at(succ_num_, u) += old_succ_num;
    for (int u = v_out_; u != join_; u = at(parent_, u)) at(succ_num_, u) -= old_succ_num;
  }

  void update_potential() {
    const auto ui = static_cast<std::size_t>(u_in_);
    const double sigma = pi_[static_cast<std::size_t>(v_in_)] - pi_[ui] -
                         pred_dir_[ui] * cost_[static_cast<std::size_t>(in_arc_)];
    const int end = thread_[static_cast<std::size_t>(last_succ_[ui])];
    for (int u = u_in_; u != end; u = thread_[static_cast<std::size_t>(u)]) {
      pi_[static_cast<std::size_t>(u)] += sigma;
    }
  }

  int m_;
  int n_;
  int node_num_;
  long arc_num_;
  long all_arc_num_;
  int root_;
  double art_cost_ = 0.0;
  long block_size_ = 10;
  long next_arc_ = 0;

  std::vector<double> cost_;
  std::vector<double> supply_;
  std::vector<double> flow_;
  std::vector<signed char> state_;
  std::vector<int> art_source_;
  std::vector<int> art_target_;

  std::vector<int> parent_;
  std::vector<long> pred_;
  std::vector<int> thread_;
  std::vector<int> rev_thread_;
  std::vector<int> succ_num_;
  std::vector<int> last_succ_;
  std::vector<int> pred_dir_;
  std::vector<double> pi_;
  std::vector<int> dirty_revs_;

  long in_arc_ = 0;
  int join_ = 0;
  int u_in_ = 0;
  int v_in_ = 0;
  int u_out_ = 0;
  int v_out_ = 0;
  int first_ = 0;
  int second_ = 0;
  double delta_ = 0.0;
  std::size_t iterations_ = 0;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const Matrix& cost, std::size_t max_iterations) {
  if (cost.rows() != static_cast<Eigen::Index>(supply.size()) ||
      cost.cols() != static_cast<Eigen::Index>(demand.size())) {
    throw Error(ErrorKind::dimension_mismatch, "cost matrix shape does not match marginals");
  }
  if (supply.empty() || demand.empty()) {
    throw Error(ErrorKind::invalid_spec, "transport problem needs nonempty marginals");
  }
  NetworkSimplex solver(supply, demand, cost);
  solver.run(max_iterations);
  if (solver.max_artificial_flow() > 1e-9) {
    throw Error(ErrorKind::solver_failure,
                "transport problem left " + std::to_string(solver.max_artificial_flow()) +
                    " mass on artificial arcs (unbalanced marginals?)");
  }
  return solver.solution();
}

}  // namespace gsw::detail
