#pragma once

#include "cvcluster/gaussian.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cvcluster {

/// One element of a linear-optics network. Mode indices are 0-based here;
/// serialized files use 1-based ids.
struct NetworkElement {
  enum class Type { Fourier, BeamSplitter, Swap, Phase };

  Type type;
  int mode_a = 0;
  int mode_b = -1;
  double t = 0.0;     // beam splitter transmissivity amplitude, |t| <= 1
  int sign = +1;      // beam splitter variant
  double phi = 0.0;   // phase element
  bool dagger = false;

  static NetworkElement fourier(int k, bool dag = false) {
    NetworkElement e;
    e.type = Type::Fourier;
    e.mode_a = k;
    e.dagger = dag;
    return e;
  }
  static NetworkElement beam_splitter(int k, int l, double t, int sign) {
    NetworkElement e;
    e.type = Type::BeamSplitter;
    e.mode_a = k;
    e.mode_b = l;
    e.t = t;
    e.sign = sign;
    return e;
  }
  static NetworkElement swap(int k, int l) {
    NetworkElement e;
    e.type = Type::Swap;
    e.mode_a = k;
    e.mode_b = l;
    return e;
  }
  static NetworkElement phase(int k, double phi) {
    NetworkElement e;
    e.type = Type::Phase;
    e.mode_a = k;
    e.phi = phi;
    return e;
  }
};

inline CMat element_matrix(const NetworkElement& e, int n) {
  detail::require_mode(e.mode_a, n);
  CMat m = CMat::Identity(n, n);
  switch (e.type) {
    case NetworkElement::Type::Fourier:
      m(e.mode_a, e.mode_a) = e.dagger ? Complex(0, -1) : Complex(0, 1);
      break;
    case NetworkElement::Type::Phase:
      m(e.mode_a, e.mode_a) = std::exp(Complex(0, e.phi));
      break;
    case NetworkElement::Type::BeamSplitter: {
      detail::require_mode(e.mode_b, n);
      double s = std::sqrt(std::max(0.0, 1.0 - e.t * e.t));
      m(e.mode_a, e.mode_a) = e.t;
      m(e.mode_a, e.mode_b) = s;
      m(e.mode_b, e.mode_a) = static_cast<double>(e.sign) * s;
      m(e.mode_b, e.mode_b) = -static_cast<double>(e.sign) * e.t;
      break;
    }
    case NetworkElement::Type::Swap:
      detail::require_mode(e.mode_b, n);
      m(e.mode_a, e.mode_a) = 0;
      m(e.mode_b, e.mode_b) = 0;
      m(e.mode_a, e.mode_b) = 1;
      m(e.mode_b, e.mode_a) = 1;
      break;
  }
  return m;
}

/// Ordered product of elementary unitaries; the list reads like the written
/// product, so the last element is applied to the input first.
struct ElementaryNetwork {
  int n = 0;
  std::vector<NetworkElement> elements;

  int beam_splitter_count() const {
    int c = 0;
    for (const auto& e : elements) c += e.type == NetworkElement::Type::BeamSplitter;
    return c;
  }
};

inline CMat evaluate_network(const ElementaryNetwork& net) {
  detail::require(net.n >= 1, "evaluate_network(): empty network needs a mode count");
  CMat u = CMat::Identity(net.n, net.n);
  for (const auto& e : net.elements) u = u * element_matrix(e, net.n);
  return u;
}

/// Triangular nulling scheme: at most n(n-1)/2 beam splitters plus phases
/// reproduce any unitary. Sub-diagonal entries are cleared bottom-up per column
/// by phase-aligning the two pivot rows and mixing them with a sign-+ beam
/// splitter (its own inverse), so every recorded inverse is again an element.
inline ElementaryNetwork reck_decompose(const CMat& u_in, double tol = kAlgebraTol) {
  detail::require(u_in.rows() == u_in.cols(), "reck_decompose(): matrix must be square");
  int n = static_cast<int>(u_in.rows());
  double resid = unitarity_residual(u_in);
  if (resid > tol) {
    std::ostringstream os;
    os << "reck_decompose(): matrix is not unitary, max |U^dag U - I| = " << resid;
    throw std::invalid_argument(os.str());
  }

  CMat w = u_in;
  std::vector<NetworkElement> applied;  // X_1, X_2, ... with X_K...X_1 U = I
  const double eps = 1e-14;

  auto apply_phase = [&](int k, double phi) {
    if (std::abs(phi) < eps) return;
    w.row(k) *= std::exp(Complex(0, phi));
    applied.push_back(NetworkElement::phase(k, phi));
  };

  for (int col = 0; col < n - 1; ++col) {
    for (int row = n - 1; row > col; --row) {
      Complex lo = w(row, col);
      if (std::abs(lo) <= eps) continue;
      Complex hi = w(row - 1, col);
      apply_phase(row - 1, -std::arg(hi));
      apply_phase(row, -std::arg(lo));
      double a = w(row - 1, col).real(), b = w(row, col).real();
      double rho = std::hypot(a, b);
      double t = a / rho, s = b / rho;
      // rows (row-1, row) <- [[t, s], [s, -t]] . rows; clears (row, col)
      Eigen::RowVectorXcd top = t * w.row(row - 1) + s * w.row(row);
      Eigen::RowVectorXcd bot = s * w.row(row - 1) - t * w.row(row);
      w.row(row - 1) = top;
      w.row(row) = bot;
      applied.push_back(NetworkElement::beam_splitter(row - 1, row, t, +1));
    }
  }
  for (int k = 0; k < n; ++k) apply_phase(k, -std::arg(w(k, k)));

  ElementaryNetwork net;
  net.n = n;
  for (const auto& x : applied) {
    NetworkElement inv = x;
    if (x.type == NetworkElement::Type::Phase) inv.phi = -x.phi;
    // sign-+ beam splitters are involutions
    net.elements.push_back(inv);
  }
  return net;
}

/// The three-beam-splitter network generating the linear four-mode cluster:
/// F4 S12 F1^dag B34+(1/sqrt2) B12+(-1/sqrt2) B23-(1/sqrt5) F3^dag F4^dag.
inline ElementaryNetwork paper_minimal_chain4() {
  ElementaryNetwork net;
  net.n = 4;
  net.elements = {
      NetworkElement::fourier(3),
      NetworkElement::swap(0, 1),
      NetworkElement::fourier(0, true),
      NetworkElement::beam_splitter(2, 3, 1.0 / std::sqrt(2.0), +1),
      NetworkElement::beam_splitter(0, 1, -1.0 / std::sqrt(2.0), +1),
      NetworkElement::beam_splitter(1, 2, 1.0 / std::sqrt(5.0), -1),
      NetworkElement::fourier(2, true),
      NetworkElement::fourier(3, true),
  };
  return net;
}

}  // namespace cvcluster
