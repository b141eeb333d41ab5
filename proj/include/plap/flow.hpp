#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "plap/analysis.hpp"
#include "plap/graph.hpp"
#include "plap/types.hpp"

namespace plap {

enum class WeightInit { Ones, RandomPositive };

struct FlowConfig {
  double p = 3.0;
  int k = 1;
  double tau = 0.1;
  double delta = 1e-8;
  double tol = 1e-6;
  int max_iter = 20000;
  WeightInit init = WeightInit::Ones;
  std::uint64_t seed = 0;
  int record_every = 1;

  void validate(const Graph& g) const;
};

struct FlowState {
  WeightPair w;  // strictly positive at every iteration
  int iter = 0;
  double lambda = 0.0;  // current k-th eigenvalue of the regularized pencil
  NodeFunction f;       // current eigenvector
  bool non_simple = false;  // lambda tied with a neighbor at the tie tolerance
};

struct TraceRow {
  int iter = 0;
  double lambda = 0.0;
  double err_mu = 0.0;
  double err_nu = 0.0;
  double err = 0.0;  // max(err_mu, err_nu)
  double residual = 0.0;
  bool non_simple = false;
};

struct FlowTrace {
  std::vector<TraceRow> rows;
};

struct ConvergenceError {
  double err_mu = 0.0;
  double err_nu = 0.0;
  double err = 0.0;
};

/// Relative weight increments err_mu = ||mu' - mu|| / (tau ||mu||), same for
/// nu, and their max.
ConvergenceError convergence_error(const WeightPair& prev, const WeightPair& next, double tau);

/// The explicit Euler update
///   mu' = mu + tau (mu^{(p-4)/(p-2)} |grad f|^2 / (lambda^2 ||f||^2_{2,nu}) - mu)
///   nu' = nu + tau (nu^{(p-4)/(p-2)} |f|^2 / ||grad f||^2_{2,mu} - nu)
/// with the quadratic-form norms taken at the unregularized weights.
/// Invariant under rescaling of f. Preserves strict positivity for tau <= 1.
WeightPair euler_weight_update(const Graph& g, const WeightPair& w, double lambda,
                               const NodeFunction& f, const FlowConfig& cfg);

/// One step of the saddle-point flow for the k-th energy: solves the
/// delta-regularized pencil at state.w, takes the k-th eigenpair, applies the
/// Euler update.
FlowState flow_step(const Graph& g, const FlowState& state, const FlowConfig& cfg);

/// Runs the flow from the configured initialization until err < tol or
/// max_iter. A non-converged run still returns the full report and trace
/// with converged = false.
std::pair<EigenReport, FlowTrace> run_flow(const Graph& g, const FlowConfig& cfg);

struct P2Result {
  double lambda_p2 = 0.0;   // first [p,2] eigenvalue, lambda_lin^{p-1}
  double lambda_lin = 0.0;  // first pencil eigenvalue at mu_star
  NodeFunction f;           // first eigenvector
  Eigen::VectorXd mu_star;  // may touch the boundary (zero entries)
  double energy = 0.0;      // 1/lambda_lin + mass(mu_star, p) at termination
  bool converged = false;
  bool stalled = false;     // converged in energy at arithmetic precision
  int iters = 0;
};

/// Minimizes the strictly convex mu-energy 1/lambda_1(mu, nu) + mass(mu, p)
/// for a fixed positive nu with the Euler transform restricted to mu; the
/// minimizer gives the first [p,2] eigenpair weighted in nu.
P2Result solve_p2_first(const Graph& g, const Eigen::VectorXd& nu, double p,
                        const FlowConfig& cfg);

}  // namespace plap
