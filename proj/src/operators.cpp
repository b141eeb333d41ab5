#include "plap/operators.hpp"

#include <string>

namespace plap {

namespace {

void check_node_sized(const Graph& g, const NodeFunction& f, const char* what) {
  if (f.size() != g.num_interior())
    throw Error(std::string(what) + ": node function has " + std::to_string(f.size()) +
                " entries, expected " + std::to_string(g.num_interior()));
}

void check_edge_sized(const Graph& g, const EdgeFunction& G, const char* what) {
  if (G.size() != g.num_edges())
    throw Error(std::string(what) + ": edge function has " + std::to_string(G.size()) +
                " entries, expected " + std::to_string(g.num_edges()));
}

}  // namespace

EdgeFunction gradient(const Graph& g, const NodeFunction& f) {
  check_node_sized(g, f, "gradient");
  EdgeFunction out(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const int iu = g.edge_iu(e), iv = g.edge_iv(e);
    const double fu = iu >= 0 ? f[iu] : 0.0;
    const double fv = iv >= 0 ? f[iv] : 0.0;
    out[e] = g.edges()[e].weight * (fv - fu);
  }
  return out;
}

NodeFunction divergence(const Graph& g, const EdgeFunction& G) {
  check_edge_sized(g, G, "divergence");
  NodeFunction out = NodeFunction::Zero(g.num_interior());
  for (int e = 0; e < g.num_edges(); ++e) {
    const int iu = g.edge_iu(e), iv = g.edge_iv(e);
    const double wG = g.edges()[e].weight * G[e];
    if (iv >= 0) out[iv] += wG;
    if (iu >= 0) out[iu] -= wG;
  }
  return out;
}

NodeFunction apply_p_laplacian(const Graph& g, const NodeFunction& f, double p) {
  if (!(p > 1.0)) throw Error("apply_p_laplacian: p must exceed 1");
  EdgeFunction flux = gradient(g, f);
  for (int e = 0; e < flux.size(); ++e) flux[e] = signed_pow(flux[e], p - 1.0);
  return divergence(g, flux);
}

double rayleigh_p(const Graph& g, const NodeFunction& f, double p) {
  check_node_sized(g, f, "rayleigh_p");
  const EdgeFunction grad = gradient(g, f);
  double num = 0.0, den = 0.0;
  for (int e = 0; e < grad.size(); ++e) num += std::pow(std::abs(grad[e]), p);
  for (int u = 0; u < f.size(); ++u) den += std::pow(std::abs(f[u]), p);
  if (den == 0.0) throw Error("rayleigh_p: f is zero");
  return num / den;
}

double rayleigh_2w(const Graph& g, const NodeFunction& f, const WeightPair& w) {
  check_node_sized(g, f, "rayleigh_2w");
  if (w.mu.size() != g.num_edges() || w.nu.size() != g.num_interior())
    throw Error("rayleigh_2w: weight sizes do not match the graph");
  const EdgeFunction grad = gradient(g, f);
  const double num = (w.mu.array() * grad.array().square()).sum();
  const double den = (w.nu.array() * f.array().square()).sum();
  if (den == 0.0) throw Error("rayleigh_2w: ||f||_{2,nu} is zero");
  return num / den;
}

double rayleigh_p2(const Graph& g, const NodeFunction& f, double p, const Eigen::VectorXd& nu) {
  check_node_sized(g, f, "rayleigh_p2");
  if (nu.size() != g.num_interior()) throw Error("rayleigh_p2: nu size does not match the graph");
  const EdgeFunction grad = gradient(g, f);
  double num = 0.0;
  for (int e = 0; e < grad.size(); ++e) num += std::pow(std::abs(grad[e]), p);
  const double den2 = (nu.array() * f.array().square()).sum();
  if (den2 == 0.0) throw Error("rayleigh_p2: ||f||_{2,nu} is zero");
  return num / std::pow(den2, p / 2.0);
}

WeightPair weights_from(const Graph& g, const NodeFunction& f, double p) {
  if (!(p > 2.0)) throw Error("weights_from: p must exceed 2");
  check_node_sized(g, f, "weights_from");
  const EdgeFunction grad = gradient(g, f);
  WeightPair w;
  w.mu.resize(g.num_edges());
  w.nu.resize(g.num_interior());
  for (int e = 0; e < grad.size(); ++e) w.mu[e] = std::pow(std::abs(grad[e]), p - 2.0);
  for (int u = 0; u < f.size(); ++u) w.nu[u] = std::pow(std::abs(f[u]), p - 2.0);
  return w;
}

}  // namespace plap
