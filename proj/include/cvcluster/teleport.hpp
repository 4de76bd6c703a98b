#pragma once

#include "cvcluster/gram.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace cvcluster {

enum class ClusterKind { Chain3, Diamond, Multirail };
enum class AlphaSource { Auto, Paper, RailAdapted };
enum class ClusterMethod { LinearOptics, CanonicalQnd };

/// Measurement-based teleportation through an m-rail cluster: the input is
/// attached to node 1 by a QND gate, the input mode and nodes 1..m+1 are
/// p-measured, and the output node is corrected by displacements and inverse
/// Fourier transforms.
struct ProtocolSpec {
  ClusterKind kind = ClusterKind::Diamond;
  int rails = 2;  // used when kind == Multirail
  double r_high = 12.0;
  std::vector<double> r_mid = {1.0};  // per middle column; broadcast if one entry
  double input_x = 0.0;
  double input_p = 0.0;
  std::uint64_t seed = 1;
  AlphaSource alpha_source = AlphaSource::Auto;
  ClusterMethod method = ClusterMethod::LinearOptics;
  double canonical_r = 1.0;  // uniform squeezing for the QND-made variant

  int m() const {
    switch (kind) {
      case ClusterKind::Chain3: return 1;
      case ClusterKind::Diamond: return 2;
      case ClusterKind::Multirail: return rails;
    }
    return rails;
  }
  int n_cluster() const { return m() + 2; }
  Graph graph() const { return Graph::multirail(m()); }

  /// Columns 1 and 2 carry the input/output Gram subspace and get r_high;
  /// the m remaining columns get the middle-node squeezing.
  Vec column_squeezing() const {
    int mm = m();
    detail::require(r_mid.size() == 1 || static_cast<int>(r_mid.size()) == mm,
                    "ProtocolSpec: r_mid must have one entry or one per rail");
    Vec r(mm + 2);
    r(0) = r_high;
    r(1) = r_high;
    for (int i = 0; i < mm; ++i) r(2 + i) = r_mid.size() == 1 ? r_mid[0] : r_mid[i];
    return r;
  }

  Mat alpha() const {
    AlphaSource src = alpha_source;
    if (src == AlphaSource::Auto) {
      src = (kind == ClusterKind::Diamond) ? AlphaSource::Paper : AlphaSource::RailAdapted;
    }
    if (src == AlphaSource::Paper) {
      detail::require(m() == 2, "ProtocolSpec: the published vectors cover the diamond only");
      return paper_alpha("diamond").alpha;
    }
    return rail_adapted_alpha(graph());
  }

  /// Cholesky factor of the Gram matrix taken in vertex order
  /// (node 1, output, middles): the first two columns then span exactly the
  /// input/output subspace and the middle vectors avoid them.
  static Mat rail_adapted_alpha(const Graph& g) {
    int n = g.n();
    std::vector<int> order{0, n - 1};
    for (int i = 1; i < n - 1; ++i) order.push_back(i);
    Mat gm = derive_gram(g).g;
    Mat gp(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) gp(i, j) = gm(order[i], order[j]);
    }
    Mat l = factor_gram(GramMatrix{gp}).alpha;
    Mat alpha(n, n);
    for (int pos = 0; pos < n; ++pos) alpha.row(order[pos]) = l.row(pos);
    return alpha;
  }
};

namespace detail {

/// Gaussian state kept as cov = T T^T with T the propagation matrix from the
/// initial vacuum quadratures (standard deviations folded in). Quadrature
/// combinations that cancel the large e^{+R} noise do so at coefficient level,
/// which keeps conditional variances accurate at extreme squeezing where a
/// plain covariance matrix loses everything to cancellation.
class SqrtState {
 public:
  static SqrtState vacuum(int n) {
    SqrtState s;
    s.t_ = Mat::Identity(2 * n, 2 * n) * std::sqrt(kVacuumVar);
    s.mean_ = Vec::Zero(2 * n);
    return s;
  }

  int n_modes() const { return static_cast<int>(t_.rows()) / 2; }

  void apply(const SymplecticOp& op) {
    t_ = op.S * t_;
    mean_ = op.S * mean_ + op.d;
  }
  void apply_matrix(const Mat& s) {
    t_ = s * t_;
    mean_ = s * mean_;
  }

  void append_vacuum() {
    int rows = static_cast<int>(t_.rows());
    int cols = static_cast<int>(t_.cols());
    Mat t2 = Mat::Zero(rows + 2, cols + 2);
    t2.topLeftCorner(rows, cols) = t_;
    t2(rows, cols) = std::sqrt(kVacuumVar);
    t2(rows + 1, cols + 1) = std::sqrt(kVacuumVar);
    t_ = std::move(t2);
    Vec m2 = Vec::Zero(rows + 2);
    m2.head(rows) = mean_;
    mean_ = std::move(m2);
  }

  void displace(int mode, double dx, double dp) {
    mean_(2 * mode) += dx;
    mean_(2 * mode + 1) += dp;
  }

  const Vec& mean() const { return mean_; }
  Mat cov() const { return t_ * t_.transpose(); }

  double variance(const Vec& combo) const { return (t_.transpose() * combo).squaredNorm(); }
  double covariance(const Vec& u, const Vec& v) const {
    return (t_.transpose() * u).dot(t_.transpose() * v);
  }

  double measure_p(int mode, double outcome) {
    int j = 2 * mode + 1;
    Eigen::RowVectorXd row = t_.row(j);
    double sigma = row.squaredNorm();
    require(sigma > 1e-30, "SqrtState: degenerate p measurement");
    Vec c = t_ * row.transpose();
    t_ -= (c / sigma) * row;
    mean_ += c * ((outcome - mean_(j)) / sigma);
    drop_mode(mode);
    return outcome;
  }

  double measure_p(int mode, std::mt19937_64& rng) {
    int j = 2 * mode + 1;
    double sigma = t_.row(j).squaredNorm();
    require(sigma > 1e-30, "SqrtState: degenerate p measurement");
    std::normal_distribution<double> dist(mean_(j), std::sqrt(sigma));
    return measure_p(mode, dist(rng));
  }

 private:
  void drop_mode(int mode) {
    int rows = static_cast<int>(t_.rows());
    Mat t2(rows - 2, t_.cols());
    Vec m2(rows - 2);
    int w = 0;
    for (int i = 0; i < rows; ++i) {
      if (i == 2 * mode || i == 2 * mode + 1) continue;
      t2.row(w) = t_.row(i);
      m2(w) = mean_(i);
      ++w;
    }
    t_ = std::move(t2);
    mean_ = std::move(m2);
  }

  Mat t_;
  Vec mean_;
};

}  // namespace detail

/// Outcome-dependent correction string: a displacement by minus the mean of the
/// middle outcomes, then by minus s_1, then by minus s_in, each followed by an
/// inverse Fourier transform, all on the single output mode.
inline std::vector<SymplecticOp> correction_sequence(const ProtocolSpec& spec,
                                                     const std::vector<double>& outcomes) {
  int mm = spec.m();
  detail::require(static_cast<int>(outcomes.size()) == mm + 2,
                  "correction_sequence(): need s_in, s_1 and one outcome per rail");
  double mid_mean = 0.0;
  for (int i = 0; i < mm; ++i) mid_mean += outcomes[2 + i];
  mid_mean /= mm;
  return {
      SymplecticOp::displace(1, 0, -mid_mean, 0.0), SymplecticOp::fourier_inverse(1, 0),
      SymplecticOp::displace(1, 0, -outcomes[1], 0.0), SymplecticOp::fourier_inverse(1, 0),
      SymplecticOp::displace(1, 0, -outcomes[0], 0.0), SymplecticOp::fourier_inverse(1, 0),
  };
}

struct TeleportReport {
  std::vector<double> outcomes;     // s_in, s_1, middles
  Eigen::Vector2d output_mean;      // after corrections, this shot
  Eigen::Matrix2d conditional_cov;  // per-shot output covariance (outcome independent)
  double excess_x = 0.0;            // added-noise variance over the outcome ensemble,
  double excess_p = 0.0;            // vacuum units; >= 0 up to tolerance
  double predicted_excess_x = 0.0;  // independent closed-form oracle
  double predicted_excess_p = 0.0;
  double uncorrelated_model_excess_p = 0.0;  // per-node noise sum, cross terms dropped
};

struct OracleResult {
  // coefficient rows over (x1^0, p1^0, ..., xn^0, pn^0, x_in^0, p_in^0)
  Vec x_out;
  Vec p_out;
  double excess_x = 0.0;  // ensemble added noise, vacuum units
  double excess_p = 0.0;
  Eigen::Matrix2d conditional_cov;
  double uncorrelated_model_excess_p = 0.0;
};

/// Closed-form noise accounting, independent of the covariance simulation:
/// the post-correction output operators are the exact combinations
/// x_out = x_in + n_1 - n_out and p_out = p_in - mean(n_middles), with the
/// nullifier rows taken from the closed-form coefficients c = (I + Adj^2) alpha.
/// Conditional covariances follow from one Schur complement against the
/// measured observables.
inline OracleResult heisenberg_oracle(const ProtocolSpec& spec) {
  int mm = spec.m();
  int n = spec.n_cluster();
  Graph g = spec.graph();
  int dim = 2 * (n + 1);  // basics: cluster inputs then the input mode
  auto bx = [&](int l) { return 2 * l; };
  auto bp = [&](int l) { return 2 * l + 1; };
  int in_x = 2 * n, in_p = 2 * n + 1;

  // cluster quadrature rows over the basics
  std::vector<Vec> xrow(n, Vec::Zero(dim)), prow(n, Vec::Zero(dim));
  Mat nullrow = Mat::Zero(n, dim);  // nullifier rows
  if (spec.method == ClusterMethod::LinearOptics) {
    Mat alpha = spec.alpha();
    Vec r = spec.column_squeezing();
    Mat imu = g.adjacency_matrix() * alpha;
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        xrow[k](bx(l)) = alpha(k, l) * std::exp(r(l));
        xrow[k](bp(l)) = -imu(k, l) * std::exp(-r(l));
        prow[k](bx(l)) = imu(k, l) * std::exp(r(l));
        prow[k](bp(l)) = alpha(k, l) * std::exp(-r(l));
      }
    }
    Mat c = noise_coefficients(g, alpha);
    for (int a = 0; a < n; ++a) {
      for (int l = 0; l < n; ++l) nullrow(a, bp(l)) = c(a, l) * std::exp(-r(l));
    }
  } else {
    double r = spec.canonical_r;
    for (int k = 0; k < n; ++k) {
      xrow[k](bx(k)) = std::exp(r);
      prow[k](bp(k)) = std::exp(-r);
      for (int b : g.neighbors(k)) prow[k](bx(b)) += std::exp(r);
      nullrow(k, bp(k)) = std::exp(-r);
    }
  }

  // measured observables after the QND attachment
  std::vector<Vec> meas;
  {
    Vec m1 = xrow[0];
    m1(in_p) += 1.0;  // p_in + x_1
    meas.push_back(m1);
    Vec m2 = prow[0];
    m2(in_x) += 1.0;  // p_1 + x_in
    meas.push_back(m2);
    for (int i = 0; i < mm; ++i) meas.push_back(prow[1 + i]);
  }

  OracleResult res;
  res.x_out = Vec::Zero(dim);
  res.x_out(in_x) = 1.0;
  res.x_out += nullrow.row(0).transpose();
  res.x_out -= nullrow.row(n - 1).transpose();
  res.p_out = Vec::Zero(dim);
  res.p_out(in_p) = 1.0;
  for (int i = 0; i < mm; ++i) res.p_out -= nullrow.row(1 + i).transpose() / mm;

  auto dot = [&](const Vec& a, const Vec& b) { return kVacuumVar * a.dot(b); };
  res.excess_x = vacuum_units(dot(res.x_out, res.x_out) - kVacuumVar);
  res.excess_p = vacuum_units(dot(res.p_out, res.p_out) - kVacuumVar);

  // conditional covariance of the output node, then the correction rotation
  Vec xo = xrow[n - 1], po = prow[n - 1];
  int nm = static_cast<int>(meas.size());
  Eigen::Matrix2d syy;
  syy << dot(xo, xo), dot(xo, po), dot(po, xo), dot(po, po);
  Mat sym(2, nm), smm(nm, nm);
  for (int j = 0; j < nm; ++j) {
    sym(0, j) = dot(xo, meas[j]);
    sym(1, j) = dot(po, meas[j]);
    for (int k = 0; k < nm; ++k) smm(j, k) = dot(meas[j], meas[k]);
  }
  Eigen::Matrix2d cond = syy - sym * smm.ldlt().solve(sym.transpose());
  Eigen::Matrix2d w;
  w << 0, -1, 1, 0;  // three inverse Fourier transforms: x -> -p, p -> x
  res.conditional_cov = w * cond * w.transpose();

  for (int i = 0; i < mm; ++i) {
    res.uncorrelated_model_excess_p +=
        vacuum_units(dot(nullrow.row(1 + i), nullrow.row(1 + i))) / (mm * mm);
  }
  return res;
}

/// Simulate one teleportation shot. Outcomes are sampled from the seeded RNG
/// unless forced; the ensemble excess noises are computed from the
/// pre-measurement state and do not depend on either.
inline TeleportReport run_teleport(const ProtocolSpec& spec,
                                   const std::optional<std::vector<double>>& forced = {}) {
  int mm = spec.m();
  int n = spec.n_cluster();
  Graph g = spec.graph();
  detail::SqrtState st = detail::SqrtState::vacuum(n);

  if (spec.method == ClusterMethod::LinearOptics) {
    Vec r = spec.column_squeezing();
    for (int l = 0; l < n; ++l) st.apply(SymplecticOp::squeeze(n, l, r(l)));
    Mat alpha = spec.alpha();
    CMat u = assemble_unitary(g, AlphaMatrix{alpha});
    st.apply_matrix(interferometer_symplectic(u));
  } else {
    for (int a = 0; a < n; ++a) st.apply(SymplecticOp::squeeze(n, a, spec.canonical_r));
    for (auto [a, b] : g.edges()) st.apply(SymplecticOp::qnd_cz(n, a, b));
  }

  st.append_vacuum();
  st.displace(n, spec.input_x, spec.input_p);
  st.apply(SymplecticOp::qnd_cz(n + 1, n, 0));

  TeleportReport rep;
  {
    // ensemble metric: operator combinations with the measured observables
    int dim = 2 * (n + 1);
    Vec vx = Vec::Zero(dim), vp = Vec::Zero(dim);
    vx(2 * (n - 1) + 1) = -1.0;  // -p_out_node
    vx(2 * 0 + 1) = 1.0;         // + measured p of node 1 (post QND)
    vp(2 * (n - 1)) = 1.0;       // x_out_node
    for (int i = 0; i < mm; ++i) vp(2 * (1 + i) + 1) = -1.0 / mm;
    vp(2 * n + 1) = 1.0;  // + measured p of the input mode
    rep.excess_x = vacuum_units(st.variance(vx) - kVacuumVar);
    rep.excess_p = vacuum_units(st.variance(vp) - kVacuumVar);
  }

  if (forced) {
    detail::require(static_cast<int>(forced->size()) == mm + 2,
                    "run_teleport(): need s_in, s_1 and one outcome per rail");
  }
  std::mt19937_64 rng(spec.seed);
  auto outcome = [&](int slot, int mode) {
    return forced ? st.measure_p(mode, (*forced)[slot]) : st.measure_p(mode, rng);
  };
  rep.outcomes.push_back(outcome(0, n));  // input mode sits at the end
  rep.outcomes.push_back(outcome(1, 0));  // node 1
  for (int i = 0; i < mm; ++i) rep.outcomes.push_back(outcome(2 + i, 0));

  for (const auto& op : correction_sequence(spec, rep.outcomes)) st.apply(op);

  rep.output_mean << st.mean()(0), st.mean()(1);
  rep.conditional_cov = st.cov();

  OracleResult oracle = heisenberg_oracle(spec);
  rep.predicted_excess_x = oracle.excess_x;
  rep.predicted_excess_p = oracle.excess_p;
  rep.uncorrelated_model_excess_p = oracle.uncorrelated_model_excess_p;
  return rep;
}

}  // namespace cvcluster
