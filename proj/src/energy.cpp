#include "plap/energy.hpp"

#include <cmath>
#include <string>

#include "plap/operators.hpp"

namespace plap {

double mass(const Eigen::VectorXd& weights, double p) {
  if (!(p > 2.0)) throw Error("mass: p must exceed 2");
  const double q = p / (p - 2.0);
  double sum = 0.0;
  for (int i = 0; i < weights.size(); ++i) sum += std::pow(weights[i], q);
  return (p - 2.0) / p * sum;
}

namespace {

void check_k(const Graph& g, int k, const char* what) {
  if (k < 1 || k > g.num_interior())
    throw Error(std::string(what) + ": k = " + std::to_string(k) + " outside [1, " +
                std::to_string(g.num_interior()) + "]");
}

}  // namespace

double energy_k(const Graph& g, const WeightPair& w, double p, int k, double delta) {
  check_k(g, k, "energy_k");
  if (!(p > 2.0)) throw Error("energy_k: p must exceed 2");
  const Spectrum spec = generalized_spectrum(g, w, delta);
  const double lambda = spec.eigenvalues[k - 1];
  const double zero_tol = 1e-12 * (1.0 + spec.eigenvalues[spec.size() - 1]);
  if (lambda <= zero_tol)
    throw Error("energy_k: nonpositive eigenvalue lambda_" + std::to_string(k) + " = " +
                std::to_string(lambda) + " (empty boundary?)");
  return 1.0 / lambda + mass(w.mu, p) - mass(w.nu, p);
}

EnergyGradient grad_inv_lambda(const Graph& g, const WeightPair& w, double p, int k,
                               double delta) {
  check_k(g, k, "grad_inv_lambda");
  if (!(p > 2.0)) throw Error("grad_inv_lambda: p must exceed 2");
  const Spectrum spec = generalized_spectrum(g, w, delta);
  const double lambda = spec.eigenvalues[k - 1];
  if (!(lambda > 0.0))
    throw Error("grad_inv_lambda: nonpositive eigenvalue lambda_" + std::to_string(k));
  const NodeFunction f = spec.eigenvectors.col(k - 1);
  const EdgeFunction grad = gradient(g, f);

  // Norms taken at the regularized weights: these are the exact derivatives
  // of 1/lambda_k of the delta-shifted pencil.
  const double norm_nu = ((w.nu.array() + delta) * f.array().square()).sum();
  const double norm_mu = ((w.mu.array() + delta) * grad.array().square()).sum();
  if (!(norm_nu > 0.0) || !(norm_mu > 0.0))
    throw Error("grad_inv_lambda: degenerate eigenvector norms");

  EnergyGradient out;
  out.d_mu = -grad.array().square() / (lambda * lambda * norm_nu);
  out.d_nu = f.array().square() / norm_mu;

  const int mult = multiplicity(spec, lambda);
  if (mult > 1)
    throw NonSimpleEigenvalue("grad_inv_lambda: lambda_" + std::to_string(k) +
                                  " has multiplicity " + std::to_string(mult) +
                                  "; 1/lambda_k is not differentiable there",
                              std::move(out), mult);
  return out;
}

}  // namespace plap
