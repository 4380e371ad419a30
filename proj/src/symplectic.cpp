#include "gwit/symplectic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "gwit/errors.hpp"

namespace gwit {
namespace {

void check_even_square(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 2 || a.rows() % 2 != 0)
    throw NumericalError(std::string(what) + ": need a 2N x 2N matrix, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
}

void check_symmetric(const Eigen::MatrixXd& a, const char* what) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw NumericalError(std::string(what) + ": matrix is not symmetric");
}

/// The +- spectrum of the auxiliary Hermitian/antisymmetric matrices comes
/// out as 2N moduli that must collapse to N doubly-degenerate values.  Sort
/// and match neighbours; tolerance is relative to the spectral radius, so
/// near-zero pairs (roundoff-dominated in absolute terms) still match.
Eigen::VectorXd pair_moduli(std::vector<double> mods, const char* what) {
  std::sort(mods.begin(), mods.end());
  const double scale = std::max(mods.empty() ? 0.0 : mods.back(), 1e-300);
  const int n = static_cast<int>(mods.size()) / 2;
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) {
    const double lo = mods[static_cast<size_t>(2 * k)];
    const double hi = mods[static_cast<size_t>(2 * k + 1)];
    if (hi - lo > 1e-8 * scale)
      throw NumericalError(std::string(what) +
                           ": +- eigenvalue pairing failed (" +
                           std::to_string(lo) + " vs " + std::to_string(hi) +
                           ")");
    out(k) = 0.5 * (lo + hi);
  }
  return out;
}

/// Symmetric square root; negative eigenvalues within -1e-12 (relative) are
/// clamped to zero, anything lower is an error.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": eigendecomposition failed");
  const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-12 * top)
    throw NumericalError(std::string(what) +
                         ": matrix has a significant negative eigenvalue");
  const Eigen::VectorXd roots =
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw InputError("symplectic form: n_modes must be >= 1");
  const int n = n_modes;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return omega;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& a) {
  check_even_square(a, "symplectic eigenvalues");
  check_symmetric(a, "symplectic eigenvalues");
  if (a.rows() == 2) {
    // Single mode: lambda = sqrt(det).
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (det < -1e-12 * scale * scale || a(0, 0) < -1e-12 * scale)
      throw NumericalError(
          "symplectic eigenvalues: matrix is not positive semidefinite");
    Eigen::VectorXd out(1);
    out(0) = std::sqrt(std::max(det, 0.0));
    return out;
  }
  const int n = static_cast<int>(a.rows()) / 2;
  const Eigen::MatrixXd root = symmetric_sqrt(a, "symplectic eigenvalues");
  const Eigen::MatrixXd k = root * symplectic_form(n) * root;  // antisymmetric
  // i K is Hermitian with spectrum {+-lambda}; a self-adjoint solve is far
  // better conditioned than squaring K.
  Eigen::MatrixXcd h(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c)
      h(r, c) = std::complex<double>(0.0, k(r, c));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("symplectic eigenvalues: Hermitian solve failed");
  std::vector<double> mods(static_cast<size_t>(2 * n));
  for (int i = 0; i < 2 * n; ++i) mods[static_cast<size_t>(i)] =
      std::abs(es.eigenvalues()(i));
  return pair_moduli(std::move(mods), "symplectic eigenvalues");
}

Eigen::VectorXd symplectic_eigenvalues_direct(const Eigen::MatrixXd& a) {
  check_even_square(a, "symplectic eigenvalues (direct)");
  check_symmetric(a, "symplectic eigenvalues (direct)");
  const int n = static_cast<int>(a.rows()) / 2;
  Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(n) * a);
  if (es.info() != Eigen::Success)
    throw NumericalError("symplectic eigenvalues (direct): solve failed");
  std::vector<double> mods(static_cast<size_t>(2 * n));
  for (int i = 0; i < 2 * n; ++i)
    mods[static_cast<size_t>(i)] = std::abs(es.eigenvalues()(i));
  return pair_moduli(std::move(mods), "symplectic eigenvalues (direct)");
}

WilliamsonResult williamson(const Eigen::MatrixXd& a) {
  check_even_square(a, "williamson");
  check_symmetric(a, "williamson");
  const int n = static_cast<int>(a.rows()) / 2;
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw NumericalError("williamson: eigendecomposition failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NumericalError("williamson: matrix is not positive definite");
  const Eigen::VectorXd roots = es.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd root =
      es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd inv_root = es.eigenvectors() *
                                   roots.cwiseInverse().asDiagonal() *
                                   es.eigenvectors().transpose();

  // R = A^(-1/2) Omega A^(-1/2) is antisymmetric and invertible, so its real
  // Schur form is block-diagonal with N blocks [[0, mu], [-mu, 0]],
  // mu = 1/lambda.  With Q orthogonal from the Schur factorization,
  //   S = A^(1/2) Q D^(-1/2)  (interleaved)  satisfies S J S^T = Omega
  // after reordering to the x..x p..p layout.
  const Eigen::MatrixXd r = inv_root * symplectic_form(n) * inv_root;
  Eigen::RealSchur<Eigen::MatrixXd> schur(r);
  if (schur.info() != Eigen::Success)
    throw NumericalError("williamson: Schur factorization failed");
  Eigen::MatrixXd q = schur.matrixU();
  const Eigen::MatrixXd& t = schur.matrixT();

  std::vector<double> mu(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double b = t(2 * k, 2 * k + 1);
    const double c = t(2 * k + 1, 2 * k);
    if (!(b * c < 0.0))
      throw NumericalError("williamson: unexpected Schur block structure");
    mu[static_cast<size_t>(k)] = std::sqrt(-b * c);
    if (b < 0.0) q.col(2 * k).swap(q.col(2 * k + 1));  // flip block sign
  }

  // Ascending symplectic eigenvalues lambda = 1/mu: sort column pairs.
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return mu[static_cast<size_t>(x)] > mu[static_cast<size_t>(y)];
  });

  WilliamsonResult result;
  result.eigenvalues.resize(n);
  Eigen::MatrixXd s_interleaved(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<size_t>(k)];
    const double lambda = 1.0 / mu[static_cast<size_t>(src)];
    result.eigenvalues(k) = lambda;
    const double inv_sqrt_lambda = std::sqrt(mu[static_cast<size_t>(src)]);
    s_interleaved.col(2 * k) = q.col(2 * src) * inv_sqrt_lambda;
    s_interleaved.col(2 * k + 1) = q.col(2 * src + 1) * inv_sqrt_lambda;
  }
  s_interleaved = (root * s_interleaved).eval();

  // Gather (x1,p1,x2,p2,...) columns into (x1..xN, p1..pN).
  result.basis.resize(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    result.basis.col(k) = s_interleaved.col(2 * k);
    result.basis.col(n + k) = s_interleaved.col(2 * k + 1);
  }
  return result;
}

double physicality_margin(const CovarianceState& state) {
  const Eigen::VectorXd lambdas = symplectic_eigenvalues(state.matrix());
  return lambdas.minCoeff() - state.convention().vacuum_variance;
}

double purity(const CovarianceState& state) {
  Eigen::LLT<Eigen::MatrixXd> llt(state.matrix());
  if (llt.info() != Eigen::Success)
    throw NumericalError("purity: covariance is not positive definite");
  // purity = det(2C)^(-1/2); log-scale for robustness at large N.
  double log_det = 0.0;
  for (int i = 0; i < state.dim(); ++i)
    log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
  log_det += state.dim() * std::log(2.0);
  return std::exp(-0.5 * log_det);
}

}  // namespace gwit
