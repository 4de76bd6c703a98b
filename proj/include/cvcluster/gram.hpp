#pragma once

#include "cvcluster/canonical.hpp"
#include "cvcluster/graph.hpp"

#include <cmath>
#include <string>

namespace cvcluster {

/// Pairwise inner products G_{kk'} = alpha_k . alpha_k' forced by unitarity of a
/// cluster-type interferometer; G = (I + Adj^2)^{-1}.
struct GramMatrix {
  Mat g;

  double commute_residual(const Graph& graph) const {
    Mat adj = graph.adjacency_matrix();
    return (g * adj - adj * g).cwiseAbs().maxCoeff();
  }
  double closure_residual(const Graph& graph) const {
    Mat adj = graph.adjacency_matrix();
    return (g + adj * g * adj - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  }
};

inline GramMatrix derive_gram(const Graph& g) {
  Mat adj = g.adjacency_matrix();
  Mat m = Mat::Identity(g.n(), g.n()) + adj * adj;
  return GramMatrix{m.inverse()};
}

/// Rows are the real vectors alpha_k with alpha alpha^T equal to the Gram matrix.
struct AlphaMatrix {
  Mat alpha;

  double gram_residual(const GramMatrix& g) const {
    return (alpha * alpha.transpose() - g.g).cwiseAbs().maxCoeff();
  }
};

enum class FactorStrategy { Recursive };

/// Triangular recursive construction: alpha_1 fixed by its norm, alpha_2 by one
/// overlap and its norm, and so on. This is a Cholesky factorization; the pivot
/// index is reported if the matrix fails to be positive definite.
inline AlphaMatrix factor_gram(const GramMatrix& gm, FactorStrategy = FactorStrategy::Recursive) {
  int n = static_cast<int>(gm.g.rows());
  Mat l = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j <= k; ++j) {
      double s = gm.g(k, j);
      for (int t = 0; t < j; ++t) s -= l(k, t) * l(j, t);
      if (j == k) {
        if (s <= 0.0) {
          std::ostringstream os;
          os << "factor_gram(): matrix is not positive definite, leading minor of order "
             << (k + 1) << " has pivot " << s;
          throw std::invalid_argument(os.str());
        }
        l(k, k) = std::sqrt(s);
      } else {
        l(k, j) = s / l(j, j);
      }
    }
  }
  return AlphaMatrix{l};
}

/// Interferometer with columns (u_l)_k = alpha_{kl} + i sum_{b in N_k} alpha_{bl};
/// unitary exactly when alpha alpha^T equals the graph's Gram matrix.
inline CMat assemble_unitary(const Graph& g, const AlphaMatrix& am, double tol = kAlgebraTol) {
  detail::require(am.alpha.rows() == g.n() && am.alpha.cols() == g.n(),
                  "assemble_unitary(): alpha size does not match graph");
  CMat u = am.alpha.cast<Complex>() +
           Complex(0, 1) * (g.adjacency_matrix() * am.alpha).cast<Complex>();
  double resid = unitarity_residual(u);
  if (resid > tol) {
    std::ostringstream os;
    os << "assemble_unitary(): alpha is not Gram-consistent, unitarity residual " << resid;
    throw std::invalid_argument(os.str());
  }
  return u;
}

/// Published example solutions, addressable as "paper:twomode", "paper:chain4",
/// "paper:diamond", "paper:sixmode" (the prefix is optional).
inline AlphaMatrix paper_alpha(const std::string& name) {
  std::string key = name.rfind("paper:", 0) == 0 ? name.substr(6) : name;
  const double s2 = std::sqrt(2.0), s10 = std::sqrt(10.0), s3 = std::sqrt(3.0),
               s15 = std::sqrt(15.0), s35 = std::sqrt(3.0 / 5.0), s5 = std::sqrt(5.0),
               s20 = std::sqrt(20.0);
  if (key == "twomode") {
    Mat a(2, 2);
    a << 1 / s2, 0, 0, 1 / s2;
    return AlphaMatrix{a};
  }
  if (key == "chain4") {
    Mat a(4, 4);
    a << 1 / s2, 1 / s10, 0, 0,
         0, 0, -2 / s10, 0,
         0, -2 / s10, 0, 0,
         0, 0, 1 / s10, -1 / s2;
    return AlphaMatrix{a};
  }
  if (key == "diamond") {
    Mat a(4, 4);
    a << 1 / s3, -2 / s15, 0, 0,
         0, 0, 1 / s3, -2 / s15,
         0, 0, 0, s35,
         0, s35, 0, 0;
    return AlphaMatrix{a};
  }
  if (key == "sixmode") {
    Mat a = Mat::Zero(6, 6);
    a.row(0) << 1 / s5, 1 / s2, 0, 0, 0, 0;
    a.row(1) << 0, 0, 0, -1 / s20, 0, 0.5;
    a.row(2) << 1 / s5, -1 / s2, 0, 0, 0, 0;
    a.row(3) << 0, 0, 0, 1 / s5, 1 / s2, 0;
    a.row(4) << -1 / s20, 0, 0.5, 0, 0, 0;
    a.row(5) << 0, 0, 0, 1 / s5, -1 / s2, 0;
    return AlphaMatrix{a};
  }
  throw std::invalid_argument("paper_alpha(): unknown fixture '" + name + "'");
}

/// Graph the named fixture lives on.
inline Graph paper_graph(const std::string& name) {
  std::string key = name.rfind("paper:", 0) == 0 ? name.substr(6) : name;
  if (key == "twomode") return Graph::chain(2);
  if (key == "chain4") return Graph::chain(4);
  if (key == "diamond") return Graph::diamond();
  if (key == "sixmode") return Graph::sixmode();
  throw std::invalid_argument("paper_graph(): unknown fixture '" + name + "'");
}

/// Uniform squeezing that brings the worst per-vertex excess noise of the
/// recursively factored circuit down to `target` vacuum units.
inline double gram_squeeze_for_excess(const Graph& g, double target) {
  detail::require(target > 0.0, "gram_squeeze_for_excess(): target must be positive");
  AlphaMatrix am = factor_gram(derive_gram(g));
  Mat c = noise_coefficients(g, am.alpha);
  double worst = 0.0;
  for (int a = 0; a < g.n(); ++a) worst = std::max(worst, c.row(a).squaredNorm());
  return 0.5 * std::log(worst / target);
}

/// Full gram-route synthesis: derive, factor, assemble.
inline SynthesisResult synthesize_gram(const Graph& g, const Vec& r) {
  detail::require(r.size() == g.n(), "synthesize_gram(): need one squeezing value per mode");
  AlphaMatrix am = factor_gram(derive_gram(g));
  SynthesisResult res;
  res.u = assemble_unitary(g, am);
  res.v = CMat::Identity(g.n(), g.n());
  res.r = r;
  res.lambda_a = Vec::Zero(g.n());
  res.lambda_b = Vec::Zero(g.n());
  res.gram = GramProvenance{am.alpha};
  return res;
}

inline SynthesisResult synthesize_gram_fixture(const std::string& name, const Vec& r) {
  Graph g = paper_graph(name);
  detail::require(r.size() == g.n(), "synthesize_gram_fixture(): squeezing size mismatch");
  AlphaMatrix am = paper_alpha(name);
  SynthesisResult res;
  res.u = assemble_unitary(g, am);
  res.v = CMat::Identity(g.n(), g.n());
  res.r = r;
  res.lambda_a = Vec::Zero(g.n());
  res.lambda_b = Vec::Zero(g.n());
  res.gram = GramProvenance{am.alpha};
  return res;
}

}  // namespace cvcluster
