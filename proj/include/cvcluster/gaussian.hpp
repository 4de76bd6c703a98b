#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvcluster {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Quadrature convention: a = x + i p with [x, p] = i/2, so the vacuum has
/// Var(x) = Var(p) = 1/4. Quadratures are interleaved (x1, p1, x2, p2, ...).
inline constexpr double kVacuumVar = 0.25;

/// Default tolerance for algebraic identities (unitarity, symplecticity).
inline constexpr double kAlgebraTol = 1e-9;

inline double db_from_nats(double r) { return r * 20.0 / std::log(10.0); }
inline double nats_from_db(double db) { return db * std::log(10.0) / 20.0; }

/// Variance expressed in vacuum units (vacuum quadrature = 1).
inline double vacuum_units(double absolute_variance) { return absolute_variance / kVacuumVar; }

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_mode(int mode, int n_modes) {
  if (mode < 0 || mode >= n_modes) {
    throw std::invalid_argument("mode index " + std::to_string(mode) + " out of range for " +
                                std::to_string(n_modes) + " modes");
  }
}

}  // namespace detail

/// Standard symplectic form, blocks [[0, 1], [-1, 0]] per mode.
inline Mat symplectic_form(int n_modes) {
  Mat omega = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Mean vector plus covariance matrix of an n-mode Gaussian state.
class GaussianState {
 public:
  static GaussianState vacuum(int n_modes) {
    detail::require(n_modes >= 1, "vacuum(): need at least one mode");
    GaussianState s;
    s.mean_ = Vec::Zero(2 * n_modes);
    s.cov_ = Mat::Identity(2 * n_modes, 2 * n_modes) * kVacuumVar;
    return s;
  }

  static GaussianState from_mean_cov(Vec mean, Mat cov) {
    detail::require(mean.size() >= 2 && mean.size() % 2 == 0, "mean length must be even");
    detail::require(cov.rows() == mean.size() && cov.cols() == mean.size(),
                    "covariance shape does not match mean length");
    double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    detail::require(asym <= 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff()),
                    "covariance is not symmetric");
    GaussianState s;
    s.mean_ = std::move(mean);
    s.cov_ = 0.5 * (cov + cov.transpose());
    return s;
  }

  int n_modes() const { return static_cast<int>(mean_.size()) / 2; }
  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }

  double mean_x(int mode) const { return mean_(2 * mode); }
  double mean_p(int mode) const { return mean_(2 * mode + 1); }
  double var_x(int mode) const { return cov_(2 * mode, 2 * mode); }
  double var_p(int mode) const { return cov_(2 * mode + 1, 2 * mode + 1); }

  /// Tensor product with `extra` vacuum modes appended at the end.
  GaussianState append_vacuum(int extra = 1) const {
    detail::require(extra >= 1, "append_vacuum(): extra must be positive");
    int d = static_cast<int>(mean_.size());
    GaussianState s;
    s.mean_ = Vec::Zero(d + 2 * extra);
    s.mean_.head(d) = mean_;
    s.cov_ = Mat::Identity(d + 2 * extra, d + 2 * extra) * kVacuumVar;
    s.cov_.topLeftCorner(d, d) = cov_;
    return s;
  }

 private:
  GaussianState() = default;
  Vec mean_;
  Mat cov_;

  friend GaussianState apply(const GaussianState&, const struct SymplecticOp&);
  friend struct HomodyneResult;
  friend HomodyneResult homodyne_p(const GaussianState&, int, double);
};

/// An elementary Gaussian unitary: 2n x 2n symplectic matrix plus displacement.
struct SymplecticOp {
  enum class Kind { Squeeze, BeamSplitter, Fourier, FourierInverse, QndCz, Displace, Swap };

  Kind kind;
  int mode_a = 0;
  int mode_b = -1;
  double param = 0.0;  // R, t, gain, ... depending on kind
  int sign = +1;       // beam splitter variant
  double dx = 0.0, dp = 0.0;

  Mat S;
  Vec d;

  /// x -> e^{+R} x, p -> e^{-R} p on one mode; R > 0 squeezes the momentum.
  static SymplecticOp squeeze(int n, int mode, double r) {
    detail::require_mode(mode, n);
    SymplecticOp op = identity(n);
    op.kind = Kind::Squeeze;
    op.mode_a = mode;
    op.param = r;
    op.S(2 * mode, 2 * mode) = std::exp(+r);
    op.S(2 * mode + 1, 2 * mode + 1) = std::exp(-r);
    return op;
  }

  /// Real beam splitter block [[t, s], [±s, ∓t]] with s = sqrt(1 - t^2),
  /// acting identically on the x and p quadratures of modes (a, b).
  static SymplecticOp beam_splitter(int n, int a, int b, double t, int sign = +1) {
    detail::require_mode(a, n);
    detail::require_mode(b, n);
    detail::require(a != b, "beam_splitter(): modes must differ");
    detail::require(t >= -1.0 && t <= 1.0, "beam_splitter(): need |t| <= 1");
    detail::require(sign == +1 || sign == -1, "beam_splitter(): sign must be +1 or -1");
    SymplecticOp op = identity(n);
    op.kind = Kind::BeamSplitter;
    op.mode_a = a;
    op.mode_b = b;
    op.param = t;
    op.sign = sign;
    double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (int q = 0; q < 2; ++q) {  // same block on x and p
      int ia = 2 * a + q, ib = 2 * b + q;
      op.S(ia, ia) = t;
      op.S(ia, ib) = s;
      op.S(ib, ia) = sign * s;
      op.S(ib, ib) = -sign * t;
    }
    return op;
  }

  /// a -> i a on one mode: x -> -p, p -> x.
  static SymplecticOp fourier(int n, int mode) {
    detail::require_mode(mode, n);
    SymplecticOp op = identity(n);
    op.kind = Kind::Fourier;
    op.mode_a = mode;
    op.S(2 * mode, 2 * mode) = 0.0;
    op.S(2 * mode + 1, 2 * mode + 1) = 0.0;
    op.S(2 * mode, 2 * mode + 1) = -1.0;
    op.S(2 * mode + 1, 2 * mode) = 1.0;
    return op;
  }

  /// a -> -i a on one mode: x -> p, p -> -x.
  static SymplecticOp fourier_inverse(int n, int mode) {
    detail::require_mode(mode, n);
    SymplecticOp op = identity(n);
    op.kind = Kind::FourierInverse;
    op.mode_a = mode;
    op.S(2 * mode, 2 * mode) = 0.0;
    op.S(2 * mode + 1, 2 * mode + 1) = 0.0;
    op.S(2 * mode, 2 * mode + 1) = 1.0;
    op.S(2 * mode + 1, 2 * mode) = -1.0;
    return op;
  }

  /// QND / CZ coupling: p_a -> p_a + g x_b and p_b -> p_b + g x_a.
  static SymplecticOp qnd_cz(int n, int a, int b, double gain = 1.0) {
    detail::require_mode(a, n);
    detail::require_mode(b, n);
    detail::require(a != b, "qnd_cz(): modes must differ");
    SymplecticOp op = identity(n);
    op.kind = Kind::QndCz;
    op.mode_a = a;
    op.mode_b = b;
    op.param = gain;
    op.S(2 * a + 1, 2 * b) += gain;
    op.S(2 * b + 1, 2 * a) += gain;
    return op;
  }

  static SymplecticOp displace(int n, int mode, double dx, double dp) {
    detail::require_mode(mode, n);
    SymplecticOp op = identity(n);
    op.kind = Kind::Displace;
    op.mode_a = mode;
    op.dx = dx;
    op.dp = dp;
    op.d(2 * mode) = dx;
    op.d(2 * mode + 1) = dp;
    return op;
  }

  static SymplecticOp swap(int n, int a, int b) {
    detail::require_mode(a, n);
    detail::require_mode(b, n);
    detail::require(a != b, "swap(): modes must differ");
    SymplecticOp op = identity(n);
    op.kind = Kind::Swap;
    op.mode_a = a;
    op.mode_b = b;
    for (int q = 0; q < 2; ++q) {
      int ia = 2 * a + q, ib = 2 * b + q;
      op.S(ia, ia) = 0.0;
      op.S(ib, ib) = 0.0;
      op.S(ia, ib) = 1.0;
      op.S(ib, ia) = 1.0;
    }
    return op;
  }

  int n_modes() const { return static_cast<int>(S.rows()) / 2; }

  /// Symplecticity residual max|S Omega S^T - Omega|.
  double symplectic_residual() const {
    Mat omega = symplectic_form(n_modes());
    return (S * omega * S.transpose() - omega).cwiseAbs().maxCoeff();
  }

 private:
  static SymplecticOp identity(int n) {
    detail::require(n >= 1, "op needs at least one mode");
    SymplecticOp op;
    op.kind = Kind::Displace;
    op.S = Mat::Identity(2 * n, 2 * n);
    op.d = Vec::Zero(2 * n);
    return op;
  }
};

inline GaussianState apply(const GaussianState& state, const SymplecticOp& op) {
  detail::require(op.n_modes() == state.n_modes(),
                  "apply(): op acts on " + std::to_string(op.n_modes()) + " modes, state has " +
                      std::to_string(state.n_modes()));
  GaussianState out = state;
  out.mean_ = op.S * state.mean_ + op.d;
  Mat c = op.S * state.cov_ * op.S.transpose();
  out.cov_ = 0.5 * (c + c.transpose());
  return out;
}

/// 2n x 2n symplectic realizing a' = U a: blocks [[Re U, -Im U], [Im U, Re U]]
/// in interleaved quadrature ordering.
inline Mat interferometer_symplectic(const CMat& u) {
  int n = static_cast<int>(u.rows());
  Mat s = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      double re = u(k, l).real(), im = u(k, l).imag();
      s(2 * k, 2 * l) = re;
      s(2 * k, 2 * l + 1) = -im;
      s(2 * k + 1, 2 * l) = im;
      s(2 * k + 1, 2 * l + 1) = re;
    }
  }
  return s;
}

inline double unitarity_residual(const CMat& u) {
  return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

inline GaussianState apply_interferometer(const GaussianState& state, const CMat& u,
                                          double tol = kAlgebraTol) {
  detail::require(u.rows() == u.cols(), "apply_interferometer(): U must be square");
  detail::require(static_cast<int>(u.rows()) == state.n_modes(),
                  "apply_interferometer(): U size does not match mode count");
  double resid = unitarity_residual(u);
  if (resid > tol) {
    std::ostringstream os;
    os << "apply_interferometer(): matrix is not unitary, max |U^dag U - I| = " << resid;
    throw std::invalid_argument(os.str());
  }
  SymplecticOp op;
  op.kind = SymplecticOp::Kind::Displace;
  op.S = interferometer_symplectic(u);
  op.d = Vec::Zero(2 * state.n_modes());
  return apply(state, op);
}

struct HomodyneResult {
  GaussianState state;  // conditional state on the remaining modes
  double outcome;
};

/// Projective p-measurement of one mode with a forced outcome. The conditional
/// covariance is the Schur-complement update and does not depend on the outcome;
/// the measured mode is removed from the state.
inline HomodyneResult homodyne_p(const GaussianState& state, int mode, double outcome) {
  int n = state.n_modes();
  detail::require_mode(mode, n);
  detail::require(n >= 2, "homodyne_p(): cannot remove the last mode");
  int j = 2 * mode + 1;
  double sigma = state.cov()(j, j);
  if (sigma < 1e-15) {
    throw std::runtime_error("homodyne_p(): degenerate measurement, marginal variance " +
                             std::to_string(sigma));
  }
  std::vector<int> keep;
  keep.reserve(2 * n - 2);
  for (int i = 0; i < 2 * n; ++i) {
    if (i != 2 * mode && i != j) keep.push_back(i);
  }
  Vec c(keep.size());
  Vec mu(keep.size());
  for (size_t a = 0; a < keep.size(); ++a) {
    c(a) = state.cov()(keep[a], j);
    mu(a) = state.mean()(keep[a]);
  }
  Mat cc(keep.size(), keep.size());
  for (size_t a = 0; a < keep.size(); ++a) {
    for (size_t b = 0; b < keep.size(); ++b) cc(a, b) = state.cov()(keep[a], keep[b]);
  }
  HomodyneResult res{GaussianState::vacuum(n - 1), outcome};
  res.state.mean_ = mu + c * ((outcome - state.mean()(j)) / sigma);
  Mat cond = cc - (c * c.transpose()) / sigma;
  res.state.cov_ = 0.5 * (cond + cond.transpose());
  return res;
}

/// Same, but the outcome is drawn from the Gaussian marginal of p_mode.
inline HomodyneResult homodyne_p(const GaussianState& state, int mode, std::mt19937_64& rng) {
  int n = state.n_modes();
  detail::require_mode(mode, n);
  int j = 2 * mode + 1;
  double sigma = state.cov()(j, j);
  if (sigma < 1e-15) {
    throw std::runtime_error("homodyne_p(): degenerate measurement, marginal variance " +
                             std::to_string(sigma));
  }
  std::normal_distribution<double> dist(state.mean()(j), std::sqrt(sigma));
  return homodyne_p(state, mode, dist(rng));
}

/// Variance of the quadrature combination coeffs . (x1,p1,...), in vacuum units.
inline double nullifier_variance(const GaussianState& state, const Vec& coeffs) {
  detail::require(coeffs.size() == 2 * state.n_modes(),
                  "nullifier_variance(): coefficient length must be 2 n_modes");
  return vacuum_units(coeffs.dot(state.cov() * coeffs));
}

/// Physicality: cov + (i/4) Omega is positive semidefinite (min eigenvalue >= -tol).
inline bool is_physical(const GaussianState& state, double tol = kAlgebraTol) {
  int d = 2 * state.n_modes();
  CMat h = state.cov().cast<Complex>() + Complex(0.0, 0.25) * symplectic_form(state.n_modes()).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  return es.eigenvalues().minCoeff() >= -tol && d > 0;
}

/// det(4 cov); equals 1 for pure Gaussian states in these units.
inline double purity_determinant(const GaussianState& state) {
  return (4.0 * state.cov()).determinant();
}

}  // namespace cvcluster
