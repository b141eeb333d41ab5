#include "plap/eig.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <lapacke.h>

#ifdef PLAP_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int);
#endif

namespace plap {

namespace {

// Problem sizes in scope solve faster single-threaded; concurrency happens
// across independent runs (sweep, tests).
void init_blas() {
#ifdef PLAP_HAVE_OPENBLAS
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
#endif
}

struct SymEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Dense symmetric eigensolve via LAPACK dsyevr. range_lo/range_hi are 1-based;
// pass 0, 0 for the full spectrum.
SymEig sym_eig(Eigen::MatrixXd a, int range_lo, int range_hi) {
  init_blas();
  const int n = static_cast<int>(a.rows());
  SymEig out;
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  const bool full = range_lo == 0;
  const int want = full ? n : range_hi - range_lo + 1;
  out.values.resize(n);
  out.vectors.resize(n, want);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(1, want)));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', full ? 'A' : 'I', 'L', n, a.data(), n, 0.0, 0.0, range_lo, range_hi,
      0.0, &found, out.values.data(), out.vectors.data(), n, isuppz.data());
  if (info != 0) throw Error("eigensolver failed (dsyevr info=" + std::to_string(info) + ")");
  if (found != want) throw Error("eigensolver returned " + std::to_string(found) +
                                 " eigenpairs, expected " + std::to_string(want));
  out.values.conservativeResize(want);
  return out;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> f) {
  int best = 0;
  double mag = -1.0;
  for (int i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a > mag) {
      mag = a;
      best = i;
    }
  }
  if (f[best] < 0.0) f = -f;
}

void check_weights(const Graph& g, const WeightPair& w, double delta) {
  if (w.mu.size() != g.num_edges() || w.nu.size() != g.num_interior())
    throw Error("pencil: weight sizes do not match the graph");
  if (!w.mu.allFinite() || !w.nu.allFinite()) throw Error("pencil: non-finite weight");
  if (delta < 0.0) throw Error("pencil: delta must be nonnegative");
  if (delta == 0.0 && g.num_interior() > 0 && w.nu.minCoeff() <= 0.0)
    throw Error("pencil: delta = 0 requires nu > 0 entrywise");
  for (int e = 0; e < w.mu.size(); ++e)
    if (w.mu[e] < 0.0) throw Error("pencil: negative mu at edge " + std::to_string(e));
  for (int u = 0; u < w.nu.size(); ++u)
    if (w.nu[u] < 0.0) throw Error("pencil: negative nu at node " + std::to_string(u));
}

// dim(Ker(L_mu) cap Ker(diag nu)) of the unregularized pencil. Ker(diag nu)
// is spanned by the coordinates where nu vanishes, so the intersection is the
// null space of the corresponding column block of L_mu.
int kernel_intersection_dim(const Graph& g, const WeightPair& w) {
  const int n = g.num_interior();
  if (n == 0) return 0;
  const double nu_floor = 1e-14 * std::max(1.0, w.nu.maxCoeff());
  std::vector<int> zeros;
  for (int u = 0; u < n; ++u)
    if (w.nu[u] <= nu_floor) zeros.push_back(u);
  if (zeros.empty()) return 0;

  const Eigen::MatrixXd L = assemble_weighted_laplacian(g, w.mu);
  Eigen::MatrixXd block(n, zeros.size());
  for (std::size_t j = 0; j < zeros.size(); ++j) block.col(j) = L.col(zeros[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  const double tol = 1e-12 * std::max(1.0, svd.singularValues().size() > 0
                                               ? svd.singularValues()[0]
                                               : 0.0);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  return static_cast<int>(zeros.size()) - rank;
}

struct Reduced {
  Eigen::VectorXd values;   // ascending pencil eigenvalues
  Eigen::MatrixXd vectors;  // normalized f' diag(nu+delta) f = 1, sign fixed
};

// Standard route: scale by diag(nu+delta)^{-1/2}. Accurate while the mass
// matrix is well conditioned.
Reduced solve_scaled(const Graph& g, const Eigen::VectorXd& mu_eff, const Eigen::VectorXd& nu_eff,
                     int range_lo, int range_hi) {
  const Eigen::VectorXd s = nu_eff.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd a = assemble_weighted_laplacian(g, mu_eff);
  a = s.asDiagonal() * a * s.asDiagonal();
  a = ((a + a.transpose()) * 0.5).eval();
  SymEig se = sym_eig(std::move(a), range_lo, range_hi);
  Reduced r;
  r.values = std::move(se.values);
  r.vectors = s.asDiagonal() * se.vectors;
  return r;
}

// Reciprocal route: Cholesky of L_{mu+delta} and an eigensolve of
// C^{-1} D C^{-T}, whose eigenvalues are 1/lambda. Keeps the interesting
// (small) pencil eigenvalues accurate when diag(nu+delta) is nearly singular,
// e.g. the delta = 1e-12 pencils built from eigenfunctions with zero entries.
Reduced solve_reciprocal(const Graph& g, const Eigen::VectorXd& mu_eff,
                         const Eigen::VectorXd& nu_eff, int range_lo, int range_hi) {
  const int n = g.num_interior();
  Eigen::MatrixXd L = assemble_weighted_laplacian(g, mu_eff);
  Eigen::LLT<Eigen::MatrixXd> llt(L);
  if (llt.info() != Eigen::Success) throw Error("pencil: Cholesky of L_{mu+delta} failed");
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
  llt.matrixL().solveInPlace(S);  // S = C^{-1}
  Eigen::MatrixXd m = S * nu_eff.asDiagonal() * S.transpose();
  m = ((m + m.transpose()) * 0.5).eval();

  // Ascending theta = 1/lambda corresponds to descending lambda.
  int t_lo = 0, t_hi = 0;
  if (range_lo != 0) {
    t_lo = n - range_hi + 1;
    t_hi = n - range_lo + 1;
  }
  SymEig se = sym_eig(std::move(m), t_lo, t_hi);

  const int got = static_cast<int>(se.values.size());
  Reduced r;
  r.values.resize(got);
  r.vectors.resize(n, got);
  for (int j = 0; j < got; ++j) {
    const int src = got - 1 - j;
    const double theta = se.values[src];
    if (!(theta > 0.0)) throw Error("pencil: nonpositive reciprocal eigenvalue");
    r.values[j] = 1.0 / theta;
    Eigen::VectorXd f = llt.matrixU().solve(se.vectors.col(src));
    r.vectors.col(j) = f / std::sqrt(theta);
  }
  return r;
}

Reduced solve_pencil(const Graph& g, const WeightPair& w, double delta, int range_lo,
                     int range_hi) {
  check_weights(g, w, delta);
  const int n = g.num_interior();
  Reduced r;
  if (n == 0) {
    r.values.resize(0);
    r.vectors.resize(0, 0);
    return r;
  }
  const Eigen::VectorXd mu_eff = w.mu.array() + delta;
  const Eigen::VectorXd nu_eff = w.nu.array() + delta;

  const double nu_cond = nu_eff.maxCoeff() / nu_eff.minCoeff();
  const double mu_spread =
      g.num_edges() > 0 ? mu_eff.maxCoeff() / mu_eff.minCoeff() : 1.0;
  const bool use_reciprocal = nu_cond > 1e8 && mu_spread < nu_cond && !g.boundary().empty();
  r = use_reciprocal ? solve_reciprocal(g, mu_eff, nu_eff, range_lo, range_hi)
                     : solve_scaled(g, mu_eff, nu_eff, range_lo, range_hi);

  const double floor = -1e-10 * (1.0 + std::abs(r.values[r.values.size() - 1]));
  for (int i = 0; i < r.values.size(); ++i) {
    if (r.values[i] < 0.0 && r.values[i] > floor) r.values[i] = 0.0;
  }
  for (int j = 0; j < r.vectors.cols(); ++j) fix_sign(r.vectors.col(j));
  return r;
}

}  // namespace

Eigen::MatrixXd assemble_weighted_laplacian(const Graph& g, const Eigen::VectorXd& mu) {
  if (mu.size() != g.num_edges()) throw Error("assemble_weighted_laplacian: mu size mismatch");
  const int n = g.num_interior();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (mu[e] < 0.0)
      throw Error("assemble_weighted_laplacian: negative mu at edge " + std::to_string(e));
    const double c = g.edges()[e].weight * g.edges()[e].weight * mu[e];
    const int iu = g.edge_iu(e), iv = g.edge_iv(e);
    if (iu >= 0) L(iu, iu) += c;
    if (iv >= 0) L(iv, iv) += c;
    if (iu >= 0 && iv >= 0) {
      L(iu, iv) -= c;
      L(iv, iu) -= c;
    }
  }
  return L;
}

Spectrum generalized_spectrum(const Graph& g, const WeightPair& w, double delta) {
  Reduced r = solve_pencil(g, w, delta, 0, 0);
  Spectrum spec;
  spec.eigenvalues = std::move(r.values);
  spec.eigenvectors = std::move(r.vectors);
  spec.delta = delta;
  spec.kernel_dim = kernel_intersection_dim(g, w);
  spec.well_defined = g.num_interior() - spec.kernel_dim;
  return spec;
}

PencilSlice pencil_range(const Graph& g, const WeightPair& w, double delta, int k_lo, int k_hi) {
  const int n = g.num_interior();
  if (k_lo < 1 || k_hi > n || k_lo > k_hi)
    throw Error("pencil_range: invalid range [" + std::to_string(k_lo) + ", " +
                std::to_string(k_hi) + "] for N = " + std::to_string(n));
  Reduced r = solve_pencil(g, w, delta, k_lo, k_hi);
  PencilSlice slice;
  slice.k_lo = k_lo;
  slice.eigenvalues = std::move(r.values);
  slice.eigenvectors = std::move(r.vectors);
  return slice;
}

int linear_index(const Spectrum& spec, double lambda, double tol) {
  for (int i = 0; i < spec.size(); ++i)
    if (std::abs(spec.eigenvalues[i] - lambda) <= tol) return i + 1;
  throw Error("linear_index: no eigenvalue within " + std::to_string(tol) + " of " +
              std::to_string(lambda));
}

int linear_index(const Spectrum& spec, double lambda) {
  return linear_index(spec, lambda, tie_tolerance(lambda));
}

int multiplicity(const Spectrum& spec, double lambda, double tol) {
  int count = 0;
  for (int i = 0; i < spec.size(); ++i)
    if (std::abs(spec.eigenvalues[i] - lambda) <= tol) ++count;
  if (count == 0)
    throw Error("multiplicity: no eigenvalue within " + std::to_string(tol) + " of " +
                std::to_string(lambda));
  return count;
}

int multiplicity(const Spectrum& spec, double lambda) {
  return multiplicity(spec, lambda, tie_tolerance(lambda));
}

}  // namespace plap
