#pragma once

#include <optional>

#include "plap/eig.hpp"
#include "plap/graph.hpp"
#include "plap/types.hpp"

namespace plap {

/// Result of an eigenpair computation plus its verification data.
/// Index fields are empty when the pair did not verify as an eigenpair at
/// tolerance (e.g. a non-converged run).
struct EigenReport {
  double lambda_p = 0.0;    // p-Laplacian eigenvalue estimate lambda_lin^{p/2}
  double lambda_lin = 0.0;  // pencil eigenvalue at the final weights
  NodeFunction f;
  WeightPair w;
  double residual = 0.0;
  std::optional<int> linear_index;
  std::optional<int> multiplicity;
  std::optional<int> morse_R;
  std::optional<int> morse_negR;
  bool converged = false;
  int iters = 0;
  int osc_count = 0;  // sign changes of the err increments, last 100 recorded steps
};

/// Relative eigen-equation residual
///   || Dp f - lambda_p |f|^{p-2} f ||_2 / || lambda_p |f|^{p-2} f ||_2
/// with lambda_p = lambda_lin^{p/2}. Requires f != 0 and lambda_lin > 0.
double residual(const Graph& g, const NodeFunction& f, double lambda_lin, double p);

struct MorseInfo {
  int morse_R = 0;      // decreasing directions of the p-Rayleigh quotient, = k-1
  int morse_negR = 0;   // increasing directions, = N-k-m+1
  int linear_index = 0; // 1-based position of lambda_p in the induced pencil
  int multiplicity = 0;
  int kernel_dim = 0;   // dim(Ker(L_mu) cap Ker(diag nu)), unregularized
};

/// Index data of an eigenpair (lambda_p, f) with residual below tol: builds
/// the induced weights |grad f|^{p-2}, |f|^{p-2} and locates lambda_p in the
/// resulting pencil spectrum (delta = 0 when nu > 0, else delta = 1e-12).
MorseInfo morse_index(const Graph& g, const NodeFunction& f, double lambda_p, double p,
                      double tol);

struct SecondDerivativeCheck {
  double lhs = 0.0;      // d^2/de^2 of the p-Rayleigh quotient along xi
  double rhs = 0.0;      // d^2/de^2 of the weighted 2-Rayleigh quotient
  double rel_err = 0.0;  // |lhs - p(p-1)/2 rhs| relative error
  bool projected = false;
};

/// Central second differences of e -> R_p(f+e*xi) and e -> R_{2,mu,nu}(f+e*xi)
/// at an eigenfunction f; the two agree up to the factor p(p-1)/2. A
/// non-tangent xi is projected onto the tangent space (flagged). h in (0, 1e-2].
SecondDerivativeCheck fd_second_derivative_identity(const Graph& g, const NodeFunction& f,
                                                    double p, const NodeFunction& xi, double h);

/// Validates grad_inv_lambda against central differences of 1/lambda_k of the
/// delta-regularized pencil, one component at a time with step h*(1+w_i).
/// Returns the maximum relative error over all mu and nu components. Throws
/// NonSimpleEigenvalue when lambda_k is not simple.
double fd_grad_inv_lambda(const Graph& g, const WeightPair& w, double p, int k, double delta,
                          double h);

/// Validates the derivative of the first [p,2] eigenvalue with respect to nu,
///   d lambda_1 / d nu_u = -(p/2) lambda_1 |f_1(u)|^2 / ||f_1||^2_{2,nu},
/// against central differences with per-node step h*(1+nu_u). Returns the
/// maximum relative error over the interior nodes.
double fd_grad_lambda1_p2(const Graph& g, const Eigen::VectorXd& nu, double p, double h);

struct DualEdgePair {
  double eta = 0.0;      // edge eigenvalue lambda_p^{q/p}, q = p/(p-1)
  EdgeFunction G;        // |grad f|^{p-2} grad f
  double edge_residual = 0.0;
};

/// Maps a node eigenpair (lambda_p, f), lambda_p > 0, to the conjugate edge
/// eigenpair and evaluates the edge eigen-equation residual
///   || grad(|div G|^{q-2} div G) - eta |G|^{q-2} G || / || eta |G|^{q-2} G ||.
DualEdgePair dual_edge_pair(const Graph& g, const NodeFunction& f, double lambda_p, double p);

}  // namespace plap
