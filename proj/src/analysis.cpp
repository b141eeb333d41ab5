#include "plap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plap/energy.hpp"
#include "plap/flow.hpp"
#include "plap/operators.hpp"

namespace plap {

double residual(const Graph& g, const NodeFunction& f, double lambda_lin, double p) {
  if (f.size() != g.num_interior()) throw Error("residual: f size mismatch");
  if (!(lambda_lin > 0.0)) throw Error("residual: lambda_lin must be positive");
  const double lambda_p = std::pow(lambda_lin, p / 2.0);
  NodeFunction rhs(f.size());
  for (int u = 0; u < f.size(); ++u) rhs[u] = lambda_p * signed_pow(f[u], p - 1.0);
  const double den = rhs.norm();
  if (den == 0.0) throw Error("residual: zero denominator (f = 0 or lambda = 0)");
  return (apply_p_laplacian(g, f, p) - rhs).norm() / den;
}

MorseInfo morse_index(const Graph& g, const NodeFunction& f, double lambda_p, double p,
                      double tol) {
  if (!(lambda_p > 0.0)) throw Error("morse_index: lambda_p must be positive");
  const double lambda_lin = std::pow(lambda_p, 2.0 / p);
  const double res = residual(g, f, lambda_lin, p);
  if (!(res < tol))
    throw Error("morse_index: (lambda_p, f) is not an eigenpair at tolerance (residual = " +
                std::to_string(res) + ")");

  // With the unnormalized induced weights the pencil eigenvalue is lambda_p
  // itself, with no p/2 power.
  const WeightPair w = weights_from(g, f, p);
  const double delta = w.nu.minCoeff() > 0.0 ? 0.0 : 1e-12;
  const Spectrum spec = generalized_spectrum(g, w, delta);
  const double loc_tol = std::max(tie_tolerance(lambda_p), 10.0 * res * (1.0 + lambda_p));

  MorseInfo mi;
  mi.linear_index = linear_index(spec, lambda_p, loc_tol);
  mi.multiplicity = multiplicity(spec, lambda_p, loc_tol);
  mi.morse_R = mi.linear_index - 1;
  mi.morse_negR = g.num_interior() - mi.linear_index - mi.multiplicity + 1;
  mi.kernel_dim = spec.kernel_dim;
  return mi;
}

SecondDerivativeCheck fd_second_derivative_identity(const Graph& g, const NodeFunction& f,
                                                    double p, const NodeFunction& xi, double h) {
  if (f.size() != g.num_interior() || xi.size() != g.num_interior())
    throw Error("fd_second_derivative_identity: size mismatch");
  if (!(h > 0.0) || h > 1e-2)
    throw Error("fd_second_derivative_identity: h must lie in (0, 1e-2]");

  NodeFunction phi(f.size());
  for (int u = 0; u < f.size(); ++u) phi[u] = signed_pow(f[u], p - 1.0);

  SecondDerivativeCheck out;
  NodeFunction dir = xi;
  const double overlap = phi.dot(dir);
  if (std::abs(overlap) > 1e-12 * std::max(1.0, phi.norm() * dir.norm())) {
    dir -= (overlap / phi.dot(f)) * f;  // project onto the tangent space
    out.projected = true;
  }
  if (dir.norm() < 1e-12 * xi.norm())
    throw Error("fd_second_derivative_identity: xi has no tangent component");
  dir /= dir.norm();

  const WeightPair w = weights_from(g, f, p);
  auto second_diff = [&](auto&& quot) {
    return (quot(f + h * dir) - 2.0 * quot(f) + quot(f - h * dir)) / (h * h);
  };
  out.lhs = second_diff([&](const NodeFunction& v) { return rayleigh_p(g, v, p); });
  out.rhs = second_diff([&](const NodeFunction& v) { return rayleigh_2w(g, v, w); });

  // Both sides can vanish (degenerate Hessian directions), so the mismatch is
  // measured against the quotient's own curvature scale p(p-1)R_p as well.
  const double scaled = p * (p - 1.0) / 2.0 * out.rhs;
  const double scale = std::max({std::abs(out.lhs), std::abs(scaled),
                                 p * (p - 1.0) * rayleigh_p(g, f, p)});
  out.rel_err = std::abs(out.lhs - scaled) / scale;
  return out;
}

double fd_grad_inv_lambda(const Graph& g, const WeightPair& w, double p, int k, double delta,
                          double h) {
  if (!(h > 0.0)) throw Error("fd_grad_inv_lambda: h must be positive");
  const EnergyGradient grad = grad_inv_lambda(g, w, p, k, delta);  // may throw NonSimple

  auto inv_lambda_k = [&](const WeightPair& wp) {
    return 1.0 / pencil_range(g, wp, delta, k, k).eigenvalues[0];
  };
  const double mu_scale = grad.d_mu.size() > 0 ? grad.d_mu.cwiseAbs().maxCoeff() : 0.0;
  const double nu_scale = grad.d_nu.size() > 0 ? grad.d_nu.cwiseAbs().maxCoeff() : 0.0;

  double max_rel = 0.0;
  for (int e = 0; e < w.mu.size(); ++e) {
    const double step = h * (1.0 + std::abs(w.mu[e]));
    WeightPair hi = w, lo = w;
    hi.mu[e] += step;
    lo.mu[e] -= step;
    if (lo.mu[e] + delta <= 0.0) lo.mu[e] = 0.0;
    const double fd = (inv_lambda_k(hi) - inv_lambda_k(lo)) / (hi.mu[e] - lo.mu[e]);
    const double denom = std::max(std::abs(grad.d_mu[e]), mu_scale * 1e-9);
    max_rel = std::max(max_rel, std::abs(fd - grad.d_mu[e]) / denom);
  }
  for (int u = 0; u < w.nu.size(); ++u) {
    const double step = h * (1.0 + std::abs(w.nu[u]));
    WeightPair hi = w, lo = w;
    hi.nu[u] += step;
    lo.nu[u] -= step;
    if (lo.nu[u] + delta <= 0.0) lo.nu[u] = 0.0;
    const double fd = (inv_lambda_k(hi) - inv_lambda_k(lo)) / (hi.nu[u] - lo.nu[u]);
    const double denom = std::max(std::abs(grad.d_nu[u]), nu_scale * 1e-9);
    max_rel = std::max(max_rel, std::abs(fd - grad.d_nu[u]) / denom);
  }
  return max_rel;
}

double fd_grad_lambda1_p2(const Graph& g, const Eigen::VectorXd& nu, double p, double h) {
  if (nu.size() != g.num_interior()) throw Error("fd_grad_lambda1_p2: nu size mismatch");
  if (g.num_interior() > 0 && nu.minCoeff() <= 0.0)
    throw Error("fd_grad_lambda1_p2: nu must be positive entrywise");
  if (!(h > 0.0)) throw Error("fd_grad_lambda1_p2: h must be positive");

  FlowConfig cfg;
  cfg.p = p;
  cfg.tol = 1e-11;
  cfg.delta = 1e-12;
  cfg.max_iter = 200000;

  const P2Result base = solve_p2_first(g, nu, p, cfg);
  if (!base.converged) throw Error("fd_grad_lambda1_p2: base solve did not converge");
  const double norm_nu = (nu.array() * base.f.array().square()).sum();

  double max_rel = 0.0;
  for (int u = 0; u < nu.size(); ++u) {
    const double step = h * (1.0 + nu[u]);
    Eigen::VectorXd nu_hi = nu, nu_lo = nu;
    nu_hi[u] += step;
    nu_lo[u] -= step;
    if (nu_lo[u] <= 0.0) throw Error("fd_grad_lambda1_p2: step drove nu negative");
    const P2Result hi = solve_p2_first(g, nu_hi, p, cfg);
    const P2Result lo = solve_p2_first(g, nu_lo, p, cfg);
    if (!hi.converged || !lo.converged)
      throw Error("fd_grad_lambda1_p2: perturbed solve did not converge");
    const double fd = (hi.lambda_p2 - lo.lambda_p2) / (2.0 * step);
    const double analytic =
        -(p / 2.0) * base.lambda_p2 * base.f[u] * base.f[u] / norm_nu;
    max_rel = std::max(max_rel, std::abs(fd - analytic) / std::abs(analytic));
  }
  return max_rel;
}

DualEdgePair dual_edge_pair(const Graph& g, const NodeFunction& f, double lambda_p, double p) {
  if (!(lambda_p > 0.0)) throw Error("dual_edge_pair: lambda_p must be positive");
  const double q = p / (p - 1.0);

  DualEdgePair out;
  out.eta = std::pow(lambda_p, q / p);
  EdgeFunction grad = gradient(g, f);
  out.G.resize(grad.size());
  for (int e = 0; e < grad.size(); ++e) out.G[e] = signed_pow(grad[e], p - 1.0);

  NodeFunction div = divergence(g, out.G);
  for (int u = 0; u < div.size(); ++u) div[u] = signed_pow(div[u], q - 1.0);
  const EdgeFunction lhs = gradient(g, div);

  EdgeFunction rhs(out.G.size());
  for (int e = 0; e < out.G.size(); ++e) rhs[e] = out.eta * signed_pow(out.G[e], q - 1.0);
  const double den = rhs.norm();
  if (den == 0.0) throw Error("dual_edge_pair: zero edge eigenvector");
  out.edge_residual = (lhs - rhs).norm() / den;
  return out;
}

}  // namespace plap
