#pragma once

#include "plap/graph.hpp"
#include "plap/types.hpp"

namespace plap {

/// Full solution of the regularized pencil L_{mu+delta} f = lambda diag(nu+delta) f.
///
/// Eigenvalues ascending and finite; eigenvector column j pairs with
/// eigenvalue j, normalized to f' diag(nu+delta) f = 1 with the sign fixed so
/// the first entry of largest magnitude is positive. kernel_dim and
/// well_defined describe the unregularized pencil: kernel_dim is
/// dim(Ker(L_mu) cap Ker(diag nu)) and well_defined = N - kernel_dim.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double delta = 0.0;
  int kernel_dim = 0;
  int well_defined = 0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Contiguous eigenvalue slice [k_lo, k_hi] (1-based) of the same pencil,
/// with the same normalization and sign conventions as Spectrum columns.
struct PencilSlice {
  int k_lo = 1;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// L_mu = grad' diag(mu) grad as a dense symmetric matrix over interior nodes.
Eigen::MatrixXd assemble_weighted_laplacian(const Graph& g, const Eigen::VectorXd& mu);

/// Solves the shifted pencil (L_{mu+delta}, diag(nu+delta)). With delta = 0
/// the caller must guarantee nu > 0 entrywise.
Spectrum generalized_spectrum(const Graph& g, const WeightPair& w, double delta);

/// Partial solve of the shifted pencil; cheaper than the full spectrum when
/// only a few eigenpairs are needed (the flow needs k-1..k+1).
PencilSlice pencil_range(const Graph& g, const WeightPair& w, double delta, int k_lo, int k_hi);

/// Default tie tolerance for index and multiplicity queries.
inline double tie_tolerance(double lambda) { return 1e-8 * (1.0 + std::abs(lambda)); }

/// 1-based index of the first eigenvalue within tol of lambda; ties resolve
/// to the smallest index. Throws when no eigenvalue is that close.
int linear_index(const Spectrum& spec, double lambda, double tol);
int linear_index(const Spectrum& spec, double lambda);

/// Number of eigenvalues within tol of lambda. For delta > 0 spectra this is
/// the pencil multiplicity including what the regularization absorbed from
/// Ker(L_mu) cap Ker(diag nu); the unregularized kernel dimension is reported
/// separately in Spectrum::kernel_dim.
int multiplicity(const Spectrum& spec, double lambda, double tol);
int multiplicity(const Spectrum& spec, double lambda);

}  // namespace plap
