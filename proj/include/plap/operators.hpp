#pragma once

#include <cmath>

#include "plap/graph.hpp"
#include "plap/types.hpp"

namespace plap {

/// Odd power sign(x)*|x|^a, with the continuous extension 0 at x = 0.
/// The entrywise map x -> |x|^{p-2} x used throughout is signed_pow(x, p-1).
inline double signed_pow(double x, double a) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), a), x);
}

/// Per stored edge (u,v): w_uv * (f(v) - f(u)), with f = 0 on boundary nodes.
EdgeFunction gradient(const Graph& g, const NodeFunction& f);

/// Adjoint of gradient: <gradient(f), G> = <f, divergence(G)> for all f, G.
NodeFunction divergence(const Graph& g, const EdgeFunction& G);

/// divergence(|grad f|^{p-2} . grad f); requires p > 1.
NodeFunction apply_p_laplacian(const Graph& g, const NodeFunction& f, double p);

/// ||grad f||_p^p / ||f||_p^p; requires f != 0.
double rayleigh_p(const Graph& g, const NodeFunction& f, double p);

/// Weighted quotient ||grad f||_{2,mu}^2 / ||f||_{2,nu}^2; requires ||f||_{2,nu} > 0.
double rayleigh_2w(const Graph& g, const NodeFunction& f, const WeightPair& w);

/// ||grad f||_p^p / ||f||_{2,nu}^p; requires ||f||_{2,nu} > 0.
double rayleigh_p2(const Graph& g, const NodeFunction& f, double p, const Eigen::VectorXd& nu);

/// The weights a function induces: mu = |grad f|^{p-2}, nu = |f|^{p-2}.
/// Requires p > 2. Zero entries are allowed and encode pencil degeneracies.
WeightPair weights_from(const Graph& g, const NodeFunction& f, double p);

}  // namespace plap
