#pragma once

#include "cvcluster/canonical.hpp"
#include "cvcluster/gram.hpp"
#include "cvcluster/network.hpp"
#include "cvcluster/teleport.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

namespace cvcluster {

using nlohmann::json;

// ---- serialization helpers -------------------------------------------------

inline json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Mat matrix_from_json(const json& j) {
  detail::require(j.is_array() && !j.empty(), "expected a matrix as array of rows");
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j.at(0).size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    detail::require(static_cast<int>(j.at(i).size()) == cols, "ragged matrix rows");
    for (int k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

inline json cmatrix_to_json(const CMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

inline CMat cmatrix_from_json(const json& j) {
  detail::require(j.is_array() && !j.empty(), "expected a complex matrix");
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j.at(0).size());
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) {
      const json& z = j.at(i).at(k);
      m(i, k) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return m;
}

inline json vector_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vec vector_from_json(const json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j.at(i).get<double>();
  return v;
}

// ---- Gaussian state ----------------------------------------------------------

inline json to_json(const GaussianState& s) {
  json j;
  j["n_modes"] = s.n_modes();
  j["ordering"] = "xpxp";
  j["mean"] = vector_to_json(s.mean());
  json cov = json::array();
  for (int i = 0; i < s.cov().rows(); ++i) {
    for (int k = 0; k < s.cov().cols(); ++k) cov.push_back(s.cov()(i, k));
  }
  j["cov"] = cov;
  return j;
}

inline GaussianState gaussian_state_from_json(const json& j) {
  int n = j.at("n_modes").get<int>();
  detail::require(j.at("ordering").get<std::string>() == "xpxp", "unsupported ordering");
  Vec mean = vector_from_json(j.at("mean"));
  detail::require(mean.size() == 2 * n, "mean length mismatch");
  const json& c = j.at("cov");
  detail::require(static_cast<int>(c.size()) == 4 * n * n, "covariance length mismatch");
  Mat cov(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int k = 0; k < 2 * n; ++k) cov(i, k) = c.at(2 * n * i + k).get<double>();
  }
  return GaussianState::from_mean_cov(std::move(mean), std::move(cov));
}

// ---- graph (1-based vertex ids in files) ------------------------------------

inline json to_json(const Graph& g) {
  json j;
  j["n"] = g.n();
  json edges = json::array();
  for (auto [a, b] : g.edges()) edges.push_back(json::array({a + 1, b + 1}));
  j["edges"] = edges;
  return j;
}

inline Graph graph_from_json(const json& j) {
  int n = j.at("n").get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    edges.emplace_back(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
  }
  return Graph(n, std::move(edges));
}

// ---- synthesis result --------------------------------------------------------

inline json to_json(const SynthesisResult& r) {
  json j;
  j["n"] = r.n();
  j["U"] = cmatrix_to_json(r.u);
  j["V"] = cmatrix_to_json(r.v);
  j["R"] = vector_to_json(r.r);
  j["lambdaA"] = vector_to_json(r.lambda_a);
  j["lambdaB"] = vector_to_json(r.lambda_b);
  json prov;
  if (r.canonical) {
    prov["method"] = "canonical";
    prov["r"] = r.canonical->r;
  } else if (r.gram) {
    prov["method"] = "gram";
    prov["alpha"] = matrix_to_json(r.gram->alpha);
  } else {
    prov["method"] = "unknown";
  }
  j["provenance"] = prov;
  return j;
}

inline SynthesisResult synthesis_result_from_json(const json& j) {
  SynthesisResult r;
  r.u = cmatrix_from_json(j.at("U"));
  r.v = j.contains("V") ? cmatrix_from_json(j.at("V"))
                        : CMat(CMat::Identity(r.u.rows(), r.u.cols()));
  r.r = vector_from_json(j.at("R"));
  r.lambda_a = vector_from_json(j.at("lambdaA"));
  r.lambda_b = vector_from_json(j.at("lambdaB"));
  const json& prov = j.at("provenance");
  std::string method = prov.at("method").get<std::string>();
  if (method == "canonical") {
    r.canonical = CanonicalProvenance{prov.at("r").get<double>()};
  } else if (method == "gram") {
    r.gram = GramProvenance{matrix_from_json(prov.at("alpha"))};
  }
  return r;
}

// ---- nullifier report ----------------------------------------------------------

inline json to_json(const NullifierReport& rep) {
  json j;
  json rows = json::array();
  for (size_t a = 0; a < rep.variance.size(); ++a) {
    rows.push_back(json{{"vertex", a + 1}, {"variance", rep.variance[a]}});
  }
  j["per_vertex"] = rows;
  j["max"] = rep.max;
  j["mean"] = rep.mean;
  return j;
}

// ---- elementary network --------------------------------------------------------

inline json to_json(const ElementaryNetwork& net) {
  json j;
  j["n"] = net.n;
  json elems = json::array();
  for (const auto& e : net.elements) {
    json el;
    switch (e.type) {
      case NetworkElement::Type::BeamSplitter:
        el["type"] = "BS";
        el["modes"] = json::array({e.mode_a + 1, e.mode_b + 1});
        el["t"] = e.t;
        el["sign"] = e.sign > 0 ? "+" : "-";
        break;
      case NetworkElement::Type::Fourier:
        el["type"] = "F";
        el["mode"] = e.mode_a + 1;
        el["dagger"] = e.dagger;
        break;
      case NetworkElement::Type::Phase:
        el["type"] = "P";
        el["mode"] = e.mode_a + 1;
        el["phi"] = e.phi;
        break;
      case NetworkElement::Type::Swap:
        el["type"] = "SWAP";
        el["modes"] = json::array({e.mode_a + 1, e.mode_b + 1});
        break;
    }
    elems.push_back(el);
  }
  j["elements"] = elems;
  return j;
}

inline ElementaryNetwork network_from_json(const json& j) {
  ElementaryNetwork net;
  net.n = j.at("n").get<int>();
  for (const auto& el : j.at("elements")) {
    std::string type = el.at("type").get<std::string>();
    if (type == "BS") {
      net.elements.push_back(NetworkElement::beam_splitter(
          el.at("modes").at(0).get<int>() - 1, el.at("modes").at(1).get<int>() - 1,
          el.at("t").get<double>(), el.at("sign").get<std::string>() == "+" ? +1 : -1));
    } else if (type == "F") {
      net.elements.push_back(
          NetworkElement::fourier(el.at("mode").get<int>() - 1, el.value("dagger", false)));
    } else if (type == "P") {
      net.elements.push_back(
          NetworkElement::phase(el.at("mode").get<int>() - 1, el.at("phi").get<double>()));
    } else if (type == "SWAP") {
      net.elements.push_back(NetworkElement::swap(el.at("modes").at(0).get<int>() - 1,
                                                  el.at("modes").at(1).get<int>() - 1));
    } else {
      throw std::invalid_argument("network_from_json(): unknown element type '" + type + "'");
    }
  }
  return net;
}

// ---- teleportation --------------------------------------------------------------

inline json to_json(const ProtocolSpec& s) {
  json j;
  switch (s.kind) {
    case ClusterKind::Chain3: j["cluster"] = "chain3"; break;
    case ClusterKind::Diamond: j["cluster"] = "diamond"; break;
    case ClusterKind::Multirail: j["cluster"] = "multirail:" + std::to_string(s.rails); break;
  }
  j["r_high"] = s.r_high;
  j["r_mid"] = s.r_mid;
  j["input"] = json::array({s.input_x, s.input_p});
  j["seed"] = s.seed;
  j["alpha"] = s.alpha_source == AlphaSource::Paper ? "paper"
               : s.alpha_source == AlphaSource::RailAdapted ? "rail" : "auto";
  j["method"] = s.method == ClusterMethod::CanonicalQnd ? "canonical" : "gram";
  if (s.method == ClusterMethod::CanonicalQnd) j["canonical_r"] = s.canonical_r;
  return j;
}

inline ProtocolSpec protocol_spec_from_json(const json& j) {
  ProtocolSpec s;
  std::string cluster = j.at("cluster").get<std::string>();
  if (cluster == "chain3") {
    s.kind = ClusterKind::Chain3;
  } else if (cluster == "diamond") {
    s.kind = ClusterKind::Diamond;
  } else if (cluster.rfind("multirail:", 0) == 0) {
    s.kind = ClusterKind::Multirail;
    s.rails = std::stoi(cluster.substr(10));
  } else {
    throw std::invalid_argument("protocol_spec_from_json(): unknown cluster '" + cluster + "'");
  }
  s.r_high = j.value("r_high", 12.0);
  if (j.contains("r_mid")) s.r_mid = j.at("r_mid").get<std::vector<double>>();
  if (j.contains("input")) {
    s.input_x = j.at("input").at(0).get<double>();
    s.input_p = j.at("input").at(1).get<double>();
  }
  s.seed = j.value("seed", std::uint64_t{1});
  std::string alpha = j.value("alpha", std::string("auto"));
  s.alpha_source = alpha == "paper" ? AlphaSource::Paper
                   : alpha == "rail" ? AlphaSource::RailAdapted : AlphaSource::Auto;
  if (j.value("method", std::string("gram")) == "canonical") {
    s.method = ClusterMethod::CanonicalQnd;
    s.canonical_r = j.value("canonical_r", 1.0);
  }
  return s;
}

inline json to_json(const TeleportReport& r) {
  json j;
  j["outcomes"] = r.outcomes;
  j["output_mean"] = json::array({r.output_mean(0), r.output_mean(1)});
  j["conditional_cov"] = json::array({r.conditional_cov(0, 0), r.conditional_cov(0, 1),
                                      r.conditional_cov(1, 0), r.conditional_cov(1, 1)});
  j["excess_x"] = r.excess_x;
  j["excess_p"] = r.excess_p;
  j["predicted_excess_x"] = r.predicted_excess_x;
  j["predicted_excess_p"] = r.predicted_excess_p;
  j["uncorrelated_model_excess_p"] = r.uncorrelated_model_excess_p;
  return j;
}

// ---- deterministic text form -----------------------------------------------

namespace detail {

inline void dump_json_17(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_json_17(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_json_17(j.at(i), out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Serialize with floating-point values at 17 significant digits; reruns of the
/// same configuration produce byte-identical files.
inline std::string dump_json(const json& j) {
  std::string out;
  detail::dump_json_17(j, out);
  out += '\n';
  return out;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << dump_json(j);
}

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return json::parse(f);
}

}  // namespace cvcluster
