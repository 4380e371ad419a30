#ifndef GWIT_SYMPLECTIC_HPP
#define GWIT_SYMPLECTIC_HPP

#include <Eigen/Dense>

#include "gwit/model.hpp"

namespace gwit {

/// Omega = [[0, I], [-I, 0]] for the (x_1..x_N, p_1..p_N) ordering.
Eigen::MatrixXd symplectic_form(int n_modes);

/// Symplectic spectrum of a symmetric positive (semi)definite 2N x 2N
/// matrix, ascending.  Computed from the Hermitian matrix i sqrt(A) Omega
/// sqrt(A), whose spectrum is +-lambda_k; pairs are matched greedily by
/// modulus with tolerance 1e-8 relative to the spectral radius.
///
/// Throws NumericalError if A is not symmetric, has an eigenvalue below
/// -1e-12 (relative), or the +- pairing fails.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& a);

/// Same spectrum via the moduli of the eigenvalues of i Omega A, using the
/// general (non-symmetric) eigensolver.  Slower and less accurate than
/// symplectic_eigenvalues(); kept as an independently-coded cross-check.
Eigen::VectorXd symplectic_eigenvalues_direct(const Eigen::MatrixXd& a);

struct WilliamsonResult {
  Eigen::VectorXd eigenvalues;  // ascending, length N
  Eigen::MatrixXd basis;        // S: symplectic, A = S diag(l..l) S^T
};

/// Williamson normal form of a symmetric positive definite matrix:
/// A = S D S^T with S Omega S^T = Omega and D = diag(l_1..l_N, l_1..l_N).
WilliamsonResult williamson(const Eigen::MatrixXd& a);

/// min symplectic eigenvalue of the covariance minus the vacuum variance;
/// >= 0 iff the state satisfies the uncertainty relation.
double physicality_margin(const CovarianceState& state);

/// det(2C)^(-1/2).  Values > 1 signal an unphysical covariance; they are
/// returned as-is (validate() carries the warning).
double purity(const CovarianceState& state);

}  // namespace gwit

#endif  // GWIT_SYMPLECTIC_HPP
