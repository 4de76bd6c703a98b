#pragma once

#include "cvcluster/gaussian.hpp"

#include <algorithm>
#include <vector>

namespace cvcluster {

/// Takagi (Autonne) factorization of a complex symmetric matrix:
/// m = u diag(values) u^T with u unitary and values >= 0, sorted descending.
struct TakagiResult {
  CMat u;
  Vec values;

  double residual(const CMat& m) const {
    return (m - u * values.asDiagonal() * u.transpose()).cwiseAbs().maxCoeff();
  }
};

namespace detail {

/// Deterministic sign fix: the first significant entry of each column gets a
/// positive real part (positive imaginary part if its real part vanishes).
/// Within degenerate value blocks, columns are ordered lexicographically.
inline void canonicalize_takagi_columns(CMat& u, Vec& values) {
  int n = static_cast<int>(u.rows());
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      Complex z = u(k, l);
      if (std::abs(z) > 1e-9) {
        bool flip = z.real() < -1e-12 || (std::abs(z.real()) <= 1e-12 && z.imag() < 0.0);
        if (flip) u.col(l) *= -1.0;
        break;
      }
    }
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  auto col_less = [&](int a, int b) {
    for (int k = 0; k < n; ++k) {
      if (std::abs(u(k, a).real() - u(k, b).real()) > 1e-9)
        return u(k, a).real() > u(k, b).real();
      if (std::abs(u(k, a).imag() - u(k, b).imag()) > 1e-9)
        return u(k, a).imag() > u(k, b).imag();
    }
    return false;
  };
  double vscale = std::max(1.0, values.cwiseAbs().maxCoeff());
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (std::abs(values(a) - values(b)) > 1e-12 * vscale) return values(a) > values(b);
    return col_less(a, b);
  });
  CMat u2(n, n);
  Vec v2(n);
  for (int i = 0; i < n; ++i) {
    u2.col(i) = u.col(idx[i]);
    v2(i) = values(idx[i]);
  }
  u = u2;
  values = v2;
}

}  // namespace detail

/// Computed through the real symmetric embedding [[Re m, Im m], [Im m, -Re m]],
/// whose spectrum is (+sigma, -sigma) pairs; eigenvectors [a; b] of +sigma give
/// Takagi columns a + i b. The zero-singular-value space needs a basis adapted
/// to J = [[0, -I], [I, 0]] so the extracted columns stay complex-orthonormal.
inline TakagiResult takagi(const CMat& m, double tol = 1e-10) {
  detail::require(m.rows() == m.cols(), "takagi(): matrix must be square");
  int n = static_cast<int>(m.rows());
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  detail::require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-11 * scale,
                  "takagi(): matrix is not symmetric");

  Mat embed(2 * n, 2 * n);
  embed.topLeftCorner(n, n) = m.real();
  embed.topRightCorner(n, n) = m.imag();
  embed.bottomLeftCorner(n, n) = m.imag();
  embed.bottomRightCorner(n, n) = -m.real();
  Eigen::SelfAdjointEigenSolver<Mat> es(embed);
  const Vec& w = es.eigenvalues();     // ascending
  const Mat& v = es.eigenvectors();

  double thresh = tol * std::max(scale, w.cwiseAbs().maxCoeff());
  std::vector<int> positive, zero;
  for (int i = 0; i < 2 * n; ++i) {
    if (w(i) > thresh) {
      positive.push_back(i);
    } else if (std::abs(w(i)) <= thresh) {
      zero.push_back(i);
    }
  }
  detail::require(static_cast<int>(positive.size() + zero.size() / 2) == n,
                  "takagi(): unbalanced spectrum of the real embedding");

  TakagiResult res;
  res.u = CMat(n, n);
  res.values = Vec(n);
  int col = 0;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it, ++col) {  // descending
    res.values(col) = w(*it);
    res.u.col(col) = v.col(*it).head(n).cast<Complex>() +
                     Complex(0, 1) * v.col(*it).tail(n).cast<Complex>();
  }

  // zero block: peel off J-conjugate pairs
  if (!zero.empty()) {
    Mat k(2 * n, zero.size());
    for (size_t j = 0; j < zero.size(); ++j) k.col(j) = v.col(zero[j]);
    std::vector<Vec> accepted;
    auto apply_j = [n](const Vec& x) {
      Vec y(2 * n);
      y.head(n) = -x.tail(n);
      y.tail(n) = x.head(n);
      return y;
    };
    for (size_t pick = 0; pick < zero.size() / 2; ++pick) {
      Vec cand;
      bool found = false;
      for (int j = 0; j < k.cols() && !found; ++j) {
        cand = k.col(j);
        for (const Vec& a : accepted) {
          cand -= a.dot(cand) * a;
          Vec ja = apply_j(a);
          cand -= ja.dot(cand) * ja;
        }
        if (cand.norm() > 1e-6) {
          cand.normalize();
          found = true;
        }
      }
      detail::require(found, "takagi(): failed to extract the null-space basis");
      accepted.push_back(cand);
      res.values(col) = 0.0;
      res.u.col(col) = cand.head(n).cast<Complex>() + Complex(0, 1) * cand.tail(n).cast<Complex>();
      ++col;
    }
  }
  detail::require(col == n, "takagi(): internal column count mismatch");

  detail::canonicalize_takagi_columns(res.u, res.values);
  return res;
}

}  // namespace cvcluster
