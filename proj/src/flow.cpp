#include "plap/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "plap/eig.hpp"
#include "plap/energy.hpp"
#include "plap/operators.hpp"

namespace plap {

namespace {

// w^ex * y^2 / denom evaluated safely. For p in (2,4) the exponent ex is
// negative and pow(w, ex) overflows once w underflows toward 1e-300; y^2 can
// underflow to an exact zero while the product is still representable. Both
// cases go through log space.
double weighted_ratio_term(double w, double ex, double y, double denom) {
  if (y == 0.0) return 0.0;
  if (w == 0.0) return ex > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (w < 1e-280 || std::abs(y) < 1e-150)
    return std::exp(ex * std::log(w) + 2.0 * std::log(std::abs(y)) - std::log(denom));
  return std::pow(w, ex) * (y * y) / denom;
}

Eigen::VectorXd random_positive(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = std::exp(u(rng));
  return out;
}

int sign_change_count(const std::vector<TraceRow>& rows, std::size_t window) {
  const std::size_t n = rows.size();
  if (n < 3) return 0;
  const std::size_t first = n > window ? n - window : 0;
  int count = 0;
  double prev_delta = 0.0;
  bool have_prev = false;
  for (std::size_t i = first + 1; i < n; ++i) {
    const double delta = rows[i].err - rows[i - 1].err;
    if (delta == 0.0) continue;
    if (have_prev && std::signbit(delta) != std::signbit(prev_delta)) ++count;
    prev_delta = delta;
    have_prev = true;
  }
  return count;
}

}  // namespace

void FlowConfig::validate(const Graph& g) const {
  if (!(p > 2.0)) throw Error("flow: p must exceed 2");
  if (k < 1 || k > g.num_interior())
    throw Error("flow: k = " + std::to_string(k) + " outside [1, " +
                std::to_string(g.num_interior()) + "]");
  if (!(tau > 0.0) || tau > 1.0) throw Error("flow: tau must lie in (0, 1]");
  if (!(delta > 0.0)) throw Error("flow: delta must be positive");
  if (!(tol > 0.0)) throw Error("flow: tol must be positive");
  if (max_iter < 1) throw Error("flow: max_iter must be at least 1");
  if (record_every < 1) throw Error("flow: record_every must be at least 1");
}

ConvergenceError convergence_error(const WeightPair& prev, const WeightPair& next, double tau) {
  if (prev.mu.size() != next.mu.size() || prev.nu.size() != next.nu.size())
    throw Error("convergence_error: weight sizes do not match");
  if (!(tau > 0.0)) throw Error("convergence_error: tau must be positive");
  const double mu_norm = prev.mu.norm();
  const double nu_norm = prev.nu.norm();
  if (mu_norm == 0.0 || nu_norm == 0.0)
    throw Error("convergence_error: zero weight norm");
  ConvergenceError ce;
  ce.err_mu = (next.mu - prev.mu).norm() / (tau * mu_norm);
  ce.err_nu = (next.nu - prev.nu).norm() / (tau * nu_norm);
  ce.err = std::max(ce.err_mu, ce.err_nu);
  return ce;
}

WeightPair euler_weight_update(const Graph& g, const WeightPair& w, double lambda,
                               const NodeFunction& f, const FlowConfig& cfg) {
  const double ex = (cfg.p - 4.0) / (cfg.p - 2.0);
  const EdgeFunction grad = gradient(g, f);
  const double norm_nu = (w.nu.array() * f.array().square()).sum();
  const double norm_mu = (w.mu.array() * grad.array().square()).sum();
  if (!(norm_nu > 0.0)) throw Error("flow: ||f||_{2,nu} vanished");
  if (!(norm_mu > 0.0)) throw Error("flow: ||grad f||_{2,mu} vanished");

  WeightPair next;
  next.mu.resize(w.mu.size());
  next.nu.resize(w.nu.size());
  // Convex-combination form: keeps the (1-tau) w part exactly positive and
  // avoids cancelling a tiny target against w at tau = 1.
  const double mu_denom = lambda * lambda * norm_nu;
  for (int e = 0; e < w.mu.size(); ++e) {
    const double target = weighted_ratio_term(w.mu[e], ex, grad[e], mu_denom);
    next.mu[e] = (1.0 - cfg.tau) * w.mu[e] + cfg.tau * target;
    if (!std::isfinite(next.mu[e]))
      throw Error("flow: non-finite mu update at edge " + std::to_string(e));
    if (!(next.mu[e] > 0.0))
      throw Error("flow: mu lost positivity at edge " + std::to_string(e));
  }
  for (int u = 0; u < w.nu.size(); ++u) {
    const double target = weighted_ratio_term(w.nu[u], ex, f[u], norm_mu);
    next.nu[u] = (1.0 - cfg.tau) * w.nu[u] + cfg.tau * target;
    if (!std::isfinite(next.nu[u]))
      throw Error("flow: non-finite nu update at node " + std::to_string(u));
    if (!(next.nu[u] > 0.0))
      throw Error("flow: nu lost positivity at node " + std::to_string(u));
  }
  return next;
}

FlowState flow_step(const Graph& g, const FlowState& state, const FlowConfig& cfg) {
  const int n = g.num_interior();
  if (cfg.k < 1 || cfg.k > n)
    throw Error("flow: k = " + std::to_string(cfg.k) + " outside [1, " + std::to_string(n) + "]");
  const int lo = std::max(1, cfg.k - 1);
  const int hi = std::min(n, cfg.k + 1);
  const PencilSlice slice = pencil_range(g, state.w, cfg.delta, lo, hi);
  const int at = cfg.k - lo;
  const double lambda = slice.eigenvalues[at];
  if (lambda <= 1e-12 * (1.0 + slice.eigenvalues[slice.eigenvalues.size() - 1]))
    throw Error("flow: pencil eigenvalue lambda_" + std::to_string(cfg.k) +
                " is numerically zero (empty boundary?)");

  FlowState next;
  next.lambda = lambda;
  next.f = slice.eigenvectors.col(at);
  next.iter = state.iter + 1;
  const double tol = tie_tolerance(lambda);
  next.non_simple =
      (at > 0 && std::abs(slice.eigenvalues[at - 1] - lambda) <= tol) ||
      (at + 1 < slice.eigenvalues.size() && std::abs(slice.eigenvalues[at + 1] - lambda) <= tol);
  next.w = euler_weight_update(g, state.w, lambda, next.f, cfg);
  return next;
}

std::pair<EigenReport, FlowTrace> run_flow(const Graph& g, const FlowConfig& cfg) {
  cfg.validate(g);

  FlowState state;
  state.iter = 0;
  if (cfg.init == WeightInit::Ones) {
    state.w.mu = Eigen::VectorXd::Ones(g.num_edges());
    state.w.nu = Eigen::VectorXd::Ones(g.num_interior());
  } else {
    std::mt19937_64 rng(cfg.seed);
    state.w.mu = random_positive(g.num_edges(), rng);
    state.w.nu = random_positive(g.num_interior(), rng);
  }

  FlowTrace trace;
  EigenReport report;
  bool converged = false;
  double final_res = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    FlowState next = flow_step(g, state, cfg);
    const ConvergenceError ce = convergence_error(state.w, next.w, cfg.tau);
    converged = ce.err < cfg.tol;

    double res = std::numeric_limits<double>::quiet_NaN();
    const bool record = iter % cfg.record_every == 0 || iter == 1 || converged ||
                        iter == cfg.max_iter;
    if (record) {
      res = next.lambda > 0.0 ? residual(g, next.f, next.lambda, cfg.p)
                              : std::numeric_limits<double>::quiet_NaN();
      trace.rows.push_back(
          {iter, next.lambda, ce.err_mu, ce.err_nu, ce.err, res, next.non_simple});
      final_res = res;
    }
    state = std::move(next);
    if (converged) break;
  }

  report.lambda_lin = state.lambda;
  report.lambda_p = std::pow(state.lambda, cfg.p / 2.0);
  report.f = state.f;
  report.w = state.w;
  report.residual = final_res;
  report.converged = converged;
  report.iters = state.iter;
  report.osc_count = sign_change_count(trace.rows, 100);

  if (std::isfinite(final_res) && final_res < 1e-4) {
    try {
      const MorseInfo mi = morse_index(g, state.f, report.lambda_p, cfg.p, 1e-4);
      report.linear_index = mi.linear_index;
      report.multiplicity = mi.multiplicity;
      report.morse_R = mi.morse_R;
      report.morse_negR = mi.morse_negR;
    } catch (const Error&) {
      // Leave the index fields empty; the residual stays in the report.
    }
  }
  return {std::move(report), std::move(trace)};
}

P2Result solve_p2_first(const Graph& g, const Eigen::VectorXd& nu, double p,
                        const FlowConfig& cfg) {
  if (!(p > 2.0)) throw Error("solve_p2_first: p must exceed 2");
  if (nu.size() != g.num_interior()) throw Error("solve_p2_first: nu size mismatch");
  if (g.num_interior() == 0) throw Error("solve_p2_first: graph has no interior nodes");
  if (nu.minCoeff() <= 0.0) throw Error("solve_p2_first: nu must be positive entrywise");
  if (g.boundary().empty()) throw Error("solve_p2_first: boundary must be nonempty");
  if (!(cfg.tau > 0.0) || cfg.tau > 1.0) throw Error("solve_p2_first: tau must lie in (0, 1]");

  const double ex = (p - 4.0) / (p - 2.0);
  Eigen::VectorXd mu;
  if (cfg.init == WeightInit::Ones) {
    mu = Eigen::VectorXd::Ones(g.num_edges());
  } else {
    std::mt19937_64 rng(cfg.seed);
    mu = random_positive(g.num_edges(), rng);
  }

  // The Euler direction is a descent direction for the strictly convex
  // mu-energy, but the plain step can cycle near boundary minimizers (mu = 0
  // on edges where the first eigenfunction has zero gradient makes the pencil
  // eigenvector flip). Backtracking on the energy keeps the descent monotone.
  auto energy_at = [&](const Eigen::VectorXd& m, double lambda) {
    return 1.0 / lambda + mass(m, p);
  };
  PencilSlice slice = pencil_range(g, {mu, nu}, cfg.delta, 1, 1);
  if (!(slice.eigenvalues[0] > 0.0))
    throw Error("solve_p2_first: nonpositive first eigenvalue");
  double energy = energy_at(mu, slice.eigenvalues[0]);

  bool converged = false;
  bool stalled = false;
  int iters = 0;
  int idle = 0;  // accepted steps with no measurable energy decrease
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    iters = iter;
    const double lambda = slice.eigenvalues[0];
    const NodeFunction f = slice.eigenvectors.col(0);
    const EdgeFunction grad = gradient(g, f);
    const double norm_nu = (nu.array() * f.array().square()).sum();
    const double denom = lambda * lambda * norm_nu;

    Eigen::VectorXd dir(mu.size());
    Eigen::VectorXd dE(mu.size());  // mu^{2/(p-2)} - h
    for (int e = 0; e < mu.size(); ++e) {
      const double h = grad[e] * grad[e] / denom;
      double target;
      if (mu[e] == 0.0 && ex < 0.0)
        target = std::pow(h, (p - 2.0) / 2.0);  // 1-d stationary value
      else
        target = weighted_ratio_term(mu[e], ex, grad[e], denom);
      if (!std::isfinite(target))
        throw Error("solve_p2_first: non-finite update at edge " + std::to_string(e));
      dir[e] = target - mu[e];
      dE[e] = std::pow(mu[e], 2.0 / (p - 2.0)) - h;
    }
    const double err = dir.norm() / mu.norm();
    if (err < cfg.tol) {
      converged = true;
      break;
    }

    const double noise_floor = 1e-15 * std::max(1.0, std::abs(energy));
    auto try_trial = [&](Eigen::VectorXd trial, double required_drop) {
      for (int e = 0; e < trial.size(); ++e)
        if (trial[e] < 0.0) trial[e] = 0.0;
      const PencilSlice trial_slice = pencil_range(g, {trial, nu}, cfg.delta, 1, 1);
      const double trial_energy = energy_at(trial, trial_slice.eigenvalues[0]);
      if (trial_energy > energy - required_drop) return false;
      idle = trial_energy > energy - noise_floor ? idle + 1 : 0;
      mu = std::move(trial);
      slice = trial_slice;
      energy = trial_energy;
      return true;
    };

    // The Euler direction, then a projected-gradient fallback: near boundary
    // minimizers (mu -> 0 on edges where the eigenfunction gradient vanishes)
    // the mu^{(p-4)/(p-2)} preconditioner amplifies eigensolver jitter and the
    // Euler step stops descending while the plain gradient still does.
    bool accepted = false;
    const double slope = -dir.dot(dE);
    if (slope > 0.0) {
      double step = cfg.tau;
      for (int halvings = 0; halvings < 30 && !accepted; ++halvings, step *= 0.5)
        accepted = try_trial(mu + step * dir, 0.1 * step * slope);
    }
    if (!accepted && dE.norm() > 0.0) {
      double step = cfg.tau * mu.norm() / dE.norm();
      for (int halvings = 0; halvings < 60 && !accepted; ++halvings, step *= 0.5)
        accepted = try_trial(mu - step * dE, 0.1 * step * dE.squaredNorm());
    }
    if (!accepted || idle > 50) {
      // No measurable descent of the strictly convex energy remains: the
      // iterate is optimal to arithmetic precision even though err > tol.
      stalled = true;
      converged = true;
      break;
    }
  }

  P2Result out;
  out.lambda_lin = slice.eigenvalues[0];
  out.lambda_p2 = std::pow(out.lambda_lin, p - 1.0);
  out.f = slice.eigenvectors.col(0);
  out.mu_star = std::move(mu);
  out.energy = energy;
  out.converged = converged;
  out.stalled = stalled;
  out.iters = iters;
  return out;
}

}  // namespace plap
