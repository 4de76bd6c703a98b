#pragma once

#include "cvcluster/gaussian.hpp"

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

namespace cvcluster {

/// Simple undirected graph on vertices 0..n-1 (files and reports use 1-based ids).
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    detail::require(n >= 1, "Graph: need at least one vertex");
    adj_.assign(n, {});
    for (auto [a, b] : edges) {
      detail::require(a >= 0 && a < n && b >= 0 && b < n, "Graph: vertex id out of range");
      detail::require(a != b, "Graph: self-loops are not allowed");
      if (a > b) std::swap(a, b);
      edges_.emplace_back(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    detail::require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(),
                    "Graph: duplicate edge");
    for (auto [a, b] : edges_) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
  }

  static Graph edgeless(int n) { return Graph(n, {}); }

  static Graph chain(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, std::move(e));
  }

  /// m parallel middle nodes between an input-side node and an output node:
  /// vertices (0, 1..m, m+1), edges 0-i and i-(m+1) for each middle node i.
  static Graph multirail(int m) {
    detail::require(m >= 1, "multirail: need at least one rail");
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= m; ++i) {
      e.emplace_back(0, i);
      e.emplace_back(i, m + 1);
    }
    return Graph(m + 2, std::move(e));
  }

  static Graph diamond() { return multirail(2); }

  /// The 6-vertex cluster with edges {1-2, 2-3, 2-5, 4-5, 5-6} (1-based).
  static Graph sixmode() {
    return Graph(6, {{0, 1}, {1, 2}, {1, 4}, {3, 4}, {4, 5}});
  }

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_.at(v); }
  int degree(int v) const { return static_cast<int>(adj_.at(v).size()); }

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(a, b));
  }

  Mat adjacency_matrix() const {
    Mat a = Mat::Zero(n_, n_);
    for (auto [u, v] : edges_) {
      a(u, v) = 1.0;
      a(v, u) = 1.0;
    }
    return a;
  }

  bool connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj_[v]) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  }

  Graph permuted(const std::vector<int>& perm) const {
    detail::require(static_cast<int>(perm.size()) == n_, "permuted(): wrong permutation size");
    std::vector<std::pair<int, int>> e;
    for (auto [a, b] : edges_) e.emplace_back(perm[a], perm[b]);
    return Graph(n_, std::move(e));
  }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

/// The operator p_a - sum_{b in N_a} x_b as a coefficient vector over (x1,p1,...).
struct Nullifier {
  int vertex;
  Vec coeffs;
};

inline std::vector<Nullifier> nullifiers(const Graph& g) {
  std::vector<Nullifier> out;
  out.reserve(g.n());
  for (int a = 0; a < g.n(); ++a) {
    Vec c = Vec::Zero(2 * g.n());
    c(2 * a + 1) = 1.0;
    for (int b : g.neighbors(a)) c(2 * b) = -1.0;
    out.push_back({a, std::move(c)});
  }
  return out;
}

struct NullifierReport {
  std::vector<double> variance;  // per vertex, vacuum units
  double max = 0.0;
  double mean = 0.0;
};

inline NullifierReport measure_nullifiers(const Graph& g, const GaussianState& state) {
  detail::require(state.n_modes() == g.n(), "measure_nullifiers(): mode count mismatch");
  NullifierReport rep;
  for (const auto& nf : nullifiers(g)) rep.variance.push_back(nullifier_variance(state, nf.coeffs));
  rep.max = *std::max_element(rep.variance.begin(), rep.variance.end());
  rep.mean = std::accumulate(rep.variance.begin(), rep.variance.end(), 0.0) /
             static_cast<double>(rep.variance.size());
  return rep;
}

/// Residual of the cluster-type interferometer condition
/// Im U_{al} = sum_{b in N_a} Re U_{bl}, maximized over (a, l).
inline double cluster_condition_residual(const CMat& u, const Graph& g) {
  detail::require(u.rows() == g.n() && u.cols() == g.n(),
                  "cluster_condition_residual(): U size does not match graph");
  double worst = 0.0;
  for (int a = 0; a < g.n(); ++a) {
    for (int l = 0; l < g.n(); ++l) {
      double s = 0.0;
      for (int b : g.neighbors(a)) s += u(b, l).real();
      worst = std::max(worst, std::abs(u(a, l).imag() - s));
    }
  }
  return worst;
}

/// Closed-form noise coefficients c = (I + Adj^2) alpha: the nullifier of vertex a
/// equals sum_l c_{al} e^{-R_l} p_l^(0) for any circuit satisfying the cluster
/// condition with Re U = alpha.
inline Mat noise_coefficients(const Graph& g, const Mat& alpha) {
  Mat adj = g.adjacency_matrix();
  return (Mat::Identity(g.n(), g.n()) + adj * adj) * alpha;
}

/// Closed-form per-vertex excess noise of the cluster correlations,
/// sum_l c_{al}^2 e^{-2 R_l} in vacuum units. Rejects circuits that violate the
/// cluster condition by more than 1e-6.
inline Vec excess_noise(const Graph& g, const CMat& u, const Vec& r) {
  detail::require(r.size() == g.n(), "excess_noise(): need one squeezing value per mode");
  double resid = cluster_condition_residual(u, g);
  if (resid > 1e-6) {
    std::ostringstream os;
    os << "excess_noise(): circuit violates the cluster condition, residual " << resid;
    throw std::invalid_argument(os.str());
  }
  Mat c = noise_coefficients(g, u.real());
  Vec out = Vec::Zero(g.n());
  for (int a = 0; a < g.n(); ++a) {
    for (int l = 0; l < g.n(); ++l) out(a) += c(a, l) * c(a, l) * std::exp(-2.0 * r(l));
  }
  return out;
}

/// Full nullifier covariance matrix Cov(n_a, n_b) in vacuum units,
/// c diag(e^{-2R}) c^T with c = (I + Adj^2) alpha.
inline Mat nullifier_covariance(const Graph& g, const Mat& alpha, const Vec& r) {
  Mat c = noise_coefficients(g, alpha);
  Vec w(g.n());
  for (int l = 0; l < g.n(); ++l) w(l) = std::exp(-2.0 * r(l));
  return c * w.asDiagonal() * c.transpose();
}

}  // namespace cvcluster
