#pragma once

#include "plap/eig.hpp"
#include "plap/graph.hpp"
#include "plap/types.hpp"

namespace plap {

/// Gradient of 1/lambda_k with respect to the pencil weights.
/// d_mu is entrywise nonpositive, d_nu entrywise nonnegative.
struct EnergyGradient {
  Eigen::VectorXd d_mu;
  Eigen::VectorXd d_nu;
};

/// lambda_k has multiplicity > 1, so 1/lambda_k is not differentiable there.
/// The exception carries the one-sided value computed from the solver's k-th
/// eigenvector; callers may proceed with it at their own risk.
class NonSimpleEigenvalue : public Error {
 public:
  NonSimpleEigenvalue(const std::string& msg, EnergyGradient grad, int mult)
      : Error(msg), gradient(std::move(grad)), multiplicity(mult) {}

  EnergyGradient gradient;
  int multiplicity = 0;
};

/// (p-2)/p * sum of entries raised to p/(p-2); requires p > 2.
double mass(const Eigen::VectorXd& weights, double p);

/// Spectral energy 1/lambda_k(w, delta) + mass(mu, p) - mass(nu, p),
/// with lambda_k from the delta-regularized pencil. k is 1-based.
double energy_k(const Graph& g, const WeightPair& w, double p, int k, double delta);

/// Analytic gradient of 1/lambda_k at the delta-regularized pencil:
///   d_mu = -|grad f_k|^2 / (lambda_k^2 ||f_k||^2_{2,nu+delta})
///   d_nu =  |f_k|^2 / ||grad f_k||^2_{2,mu+delta}
/// Invariant under the eigenvector normalization. Throws NonSimpleEigenvalue
/// when lambda_k is not simple at the default tie tolerance.
EnergyGradient grad_inv_lambda(const Graph& g, const WeightPair& w, double p, int k, double delta);

}  // namespace plap
