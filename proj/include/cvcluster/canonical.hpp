#pragma once

#include "cvcluster/gaussian.hpp"
#include "cvcluster/graph.hpp"
#include "cvcluster/takagi.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cvcluster {

/// Linear Bogoliubov transformation a' = A a + B a^dag of the canonical
/// QND-network generation scheme, acting on vacuum inputs.
struct CanonicalLubo {
  CMat a;
  CMat b;
  double r = 0.0;

  /// max violation of A A^dag - B B^dag = I and A B^T = B A^T.
  double bogoliubov_residual() const {
    int n = static_cast<int>(a.rows());
    double r1 = (a * a.adjoint() - b * b.adjoint() - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
    double r2 = (a * b.transpose() - b * a.transpose()).cwiseAbs().maxCoeff();
    return std::max(r1, r2);
  }
};

/// A_aa = cosh r, B_aa = sinh r, A_ab = B_ab = (i/2) e^{+r} for neighbors b.
inline CanonicalLubo canonical_lubo(const Graph& g, double r) {
  detail::require(r >= 0.0, "canonical_lubo(): r must be nonnegative");
  int n = g.n();
  CMat adj = g.adjacency_matrix().cast<Complex>();
  CanonicalLubo lubo;
  lubo.r = r;
  lubo.a = std::cosh(r) * CMat::Identity(n, n) + Complex(0, 0.5) * std::exp(r) * adj;
  lubo.b = std::sinh(r) * CMat::Identity(n, n) + Complex(0, 0.5) * std::exp(r) * adj;
  return lubo;
}

/// Canonical cluster state: momentum-squeezed vacua coupled by one QND gate per edge.
inline GaussianState qnd_network_state(const Graph& g, double r) {
  detail::require(r >= 0.0, "qnd_network_state(): r must be nonnegative");
  GaussianState state = GaussianState::vacuum(g.n());
  for (int a = 0; a < g.n(); ++a) state = apply(state, SymplecticOp::squeeze(g.n(), a, r));
  for (auto [a, b] : g.edges()) state = apply(state, SymplecticOp::qnd_cz(g.n(), a, b));
  return state;
}

struct CanonicalProvenance {
  double r = 0.0;
};
struct GramProvenance {
  Mat alpha;
};

/// Off-line squeezers R_l plus interferometer U replacing a Gaussian unitary.
struct SynthesisResult {
  CMat u;
  CMat v;  // diagnostic second interferometer; acts trivially on vacuum
  Vec r;   // per-mode off-line squeezing, nats
  Vec lambda_a;
  Vec lambda_b;
  std::optional<CanonicalProvenance> canonical;
  std::optional<GramProvenance> gram;

  int n() const { return static_cast<int>(u.rows()); }

  /// State produced by the circuit: squeezers on vacuum, then the interferometer.
  GaussianState output_state() const {
    GaussianState s = GaussianState::vacuum(n());
    for (int l = 0; l < n(); ++l) s = apply(s, SymplecticOp::squeeze(n(), l, r(l)));
    return apply_interferometer(s, u);
  }
};

class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Decompose the canonical LUBO into off-line squeezers and one interferometer.
///
/// U is a Takagi factor of the complex symmetric product A B^T = U A_D B_D U^T;
/// the singular values follow from d = sqrt(lambda_A lambda_B) with
/// lambda_A - lambda_B = 1, and V = A^dag U A_D^{-1} closes the pair
/// A = U A_D V^dag, B = U B_D V^T. Squeezing: e^{+-R} = sqrt(lambda_A) +- sqrt(lambda_B).
inline SynthesisResult decompose_canonical(const CanonicalLubo& lubo) {
  int n = static_cast<int>(lubo.a.rows());
  TakagiResult tk = takagi(lubo.a * lubo.b.transpose());

  SynthesisResult res;
  res.u = tk.u;
  res.lambda_a = Vec(n);
  res.lambda_b = Vec(n);
  res.r = Vec(n);
  for (int l = 0; l < n; ++l) {
    double d = tk.values(l);
    double lb = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * d * d));
    double la = lb + 1.0;
    res.lambda_a(l) = la;
    res.lambda_b(l) = lb;
    res.r(l) = std::log(std::sqrt(la) + std::sqrt(lb));
  }
  Vec inv_sqrt_la = res.lambda_a.cwiseSqrt().cwiseInverse();
  res.v = lubo.a.adjoint() * res.u * inv_sqrt_la.asDiagonal();
  res.canonical = CanonicalProvenance{lubo.r};

  Mat ad = res.lambda_a.cwiseSqrt().asDiagonal();
  Mat bd = res.lambda_b.cwiseSqrt().asDiagonal();
  double ra = (lubo.a - res.u * ad * res.v.adjoint()).cwiseAbs().maxCoeff();
  double rb = (lubo.b - res.u * bd * res.v.transpose()).cwiseAbs().maxCoeff();
  double ru = unitarity_residual(res.u);
  double rv = unitarity_residual(res.v);
  double worst = std::max({ra, rb, ru, rv});
  if (worst > 1e-8) {
    std::ostringstream os;
    os << "decompose_canonical(): factorization failed, residual |A - U A_D V^dag| = " << ra
       << ", |B - U B_D V^T| = " << rb;
    throw DecompositionError(os.str(), worst);
  }
  return res;
}

inline SynthesisResult decompose_canonical(const Graph& g, double r) {
  return decompose_canonical(canonical_lubo(g, r));
}

/// Residuals of the two singular-value conditions tying the canonical U to the
/// graph. The first couples Im U to neighbor sums of Re U through the
/// r-dependent factor C_l; it is evaluated in the multiplied-through form
/// |Im U_{al} / C_l - sum_b Re U_{bl}|, which stays finite when lambda_B -> 0.
/// The second involves second-neighbor sums of Re U through the factor D_l.
struct CanonicalDiagnostics {
  double imag_coupling_residual = 0.0;   // first condition, max over (a, l)
  double second_neighbor_residual = 0.0; // second condition, max over (a, l)
  Vec coupling_factor;                   // C_l(r) per column; +inf where lambda_B = 0 at r = 0
};

inline CanonicalDiagnostics check_canonical_conditions(const SynthesisResult& res, const Graph& g,
                                                       double r) {
  int n = g.n();
  detail::require(res.n() == n, "check_canonical_conditions(): size mismatch");
  CanonicalDiagnostics diag;
  diag.coupling_factor = Vec::Zero(n);
  double sr = std::sinh(r), cr = std::cosh(r);
  for (int l = 0; l < n; ++l) {
    double sa = std::sqrt(res.lambda_a(l)), sb = std::sqrt(res.lambda_b(l));
    double num = 0.5 * std::exp(r) * (sa + sb);
    double den = sa * sr + sb * cr;
    diag.coupling_factor(l) =
        den > 1e-12 ? num / den : std::numeric_limits<double>::infinity();
    double dl = (res.lambda_b(l) * cr * cr - res.lambda_a(l) * sr * sr) /
                (std::exp(2.0 * r) * (res.lambda_a(l) - res.lambda_b(l)) / 4.0);
    for (int a = 0; a < n; ++a) {
      double nb_sum = 0.0;
      for (int b : g.neighbors(a)) nb_sum += res.u(b, l).real();
      diag.imag_coupling_residual =
          std::max(diag.imag_coupling_residual, std::abs(res.u(a, l).imag() * den / num - nb_sum));
      double second = 0.0;
      for (int b : g.neighbors(a)) {
        for (int k : g.neighbors(b)) {
          if (k != a) second += res.u(k, l).real();
        }
      }
      diag.second_neighbor_residual =
          std::max(diag.second_neighbor_residual,
                   std::abs(res.u(a, l).real() * (dl - g.degree(a)) - second));
    }
  }
  return diag;
}

/// The closed-form two-mode canonical interferometer,
/// [[C, i], [i, C]] / sqrt(1 + C^2) with C = 1 / C_l(r); approaches the
/// Fourier-dressed 50/50 beam splitter as r -> infinity.
inline CMat canonical_twomode_unitary(double r) {
  double la = std::cosh(r) * std::cosh(r) + std::exp(2.0 * r) / 4.0;
  double lb = std::sinh(r) * std::sinh(r) + std::exp(2.0 * r) / 4.0;
  double cl = (0.5 * std::exp(r) * (std::sqrt(la) + std::sqrt(lb))) /
              (std::sqrt(la) * std::sinh(r) + std::sqrt(lb) * std::cosh(r));
  double c = 1.0 / cl;
  CMat u(2, 2);
  u << Complex(c, 0), Complex(0, 1), Complex(0, 1), Complex(c, 0);
  return u / std::sqrt(1.0 + c * c);
}

struct SqueezingBudget {
  Vec r_nats;
  Vec r_db;
  double total_db = 0.0;
  double max_db = 0.0;
};

inline SqueezingBudget squeezing_budget(const SynthesisResult& res) {
  SqueezingBudget b;
  b.r_nats = res.r;
  b.r_db = Vec(res.n());
  for (int l = 0; l < res.n(); ++l) b.r_db(l) = db_from_nats(res.r(l));
  b.total_db = b.r_db.sum();
  b.max_db = b.r_db.maxCoeff();
  return b;
}

}  // namespace cvcluster
