#ifndef GWIT_MODEL_HPP
#define GWIT_MODEL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gwit {

// Quadrature ordering throughout: xi = (x_1..x_N, p_1..p_N)^T, so a
// covariance matrix or test operator is 2N x 2N with an N x N x-x block in
// the top-left.  Mode indices are 0-based internally, 1-based in every file
// format and command-line string.

/// Internal unit convention: vacuum variance of each quadrature.
/// All stored covariances use vacuum_variance = 1/2; input declared with
/// vacuum variance 1 is rescaled by 1/2 on load.
struct QuadratureConvention {
  double vacuum_variance = 0.5;
};

enum class UnitConvention {
  kVacuumOne,   // "vacuum_1"  : vacuum quadrature variance 1
  kVacuumHalf,  // "vacuum_half": vacuum quadrature variance 1/2 (internal)
};

std::string to_string(UnitConvention units);
UnitConvention unit_convention_from_string(const std::string& tag);

/// Covariance data as found in a file, before unit normalization.
struct RawCovariance {
  std::string label;
  int n_modes = 0;
  UnitConvention units = UnitConvention::kVacuumHalf;
  Eigen::MatrixXd matrix;       // 2N x 2N, second moments
  Eigen::MatrixXd uncertainty;  // 2N x 2N, elementwise 1-sigma errors, >= 0
};

enum class Severity { kWarning, kError };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string message;
};

/// A measured (or synthesized) Gaussian state: covariance matrix plus
/// elementwise measurement uncertainties, in internal units.
///
/// Construction via from_raw() enforces: square 2N x 2N shape, symmetry of
/// the covariance within 1e-9 (then exact symmetrization), symmetric
/// non-negative uncertainty, and strict positive definiteness.  Physicality
/// (all symplectic eigenvalues >= 1/2) is *not* enforced -- an unphysical
/// matrix is a legitimate input whose detection is part of the analysis --
/// but validate() flags it as a warning.
class CovarianceState {
 public:
  /// Normalizes units, symmetrizes, validates; throws InputError on any
  /// error-severity diagnostic.
  static CovarianceState from_raw(const RawCovariance& raw);

  /// No checks at all; for building diagnostic test inputs.
  static CovarianceState unchecked(std::string label, int n_modes,
                                   Eigen::MatrixXd matrix,
                                   Eigen::MatrixXd uncertainty);

  const std::string& label() const { return label_; }
  int n_modes() const { return n_modes_; }
  int dim() const { return 2 * n_modes_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::MatrixXd& uncertainty() const { return uncertainty_; }
  QuadratureConvention convention() const { return convention_; }

  /// Same state with every uncertainty entry replaced by a constant.
  CovarianceState with_uniform_uncertainty(double delta) const;

  CovarianceState relabeled(std::string label) const;

 private:
  CovarianceState() = default;
  std::string label_;
  int n_modes_ = 0;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd uncertainty_;
  QuadratureConvention convention_;
};

/// Rescale declared units to the internal vacuum-1/2 convention.
/// Covariance and uncertainty scale together (both are linear in C).
RawCovariance normalize_units(const RawCovariance& raw);

/// Diagnostics for an already-built state: symmetry, positive definiteness,
/// uncertainty sanity (errors); physicality violation (warning).
std::vector<Diagnostic> validate(const CovarianceState& state);

/// The matrix M of a quadratic test operator L = sum_ij M_ij xi_i xi_j.
/// Invariants enforced at from_matrix(): symmetric within 1e-12, positive
/// semidefinite, and every per-mode 2x2 diagonal block strictly positive
/// definite (a mode the operator ignores would make every bound vacuous).
class TestOperator {
 public:
  static TestOperator from_matrix(Eigen::MatrixXd m);

  /// M = (G G^T + eps I) / trace(G G^T + eps I): positive definite by
  /// construction, so the spectral checks of from_matrix() are skipped.
  /// This is the optimizer's decode path.
  static TestOperator from_positive_factor(const Eigen::MatrixXd& factor,
                                           double eps);

  int n_modes() const { return n_modes_; }
  int dim() const { return 2 * n_modes_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  TestOperator() = default;
  int n_modes_ = 0;
  Eigen::MatrixXd matrix_;
};

// --- file I/O ---------------------------------------------------------------
//
// JSON: {"label": str, "n_modes": int, "units": "vacuum_1"|"vacuum_half",
//        "matrix": [[...]], "uncertainty": [[...]]}
// CSV:  '#'-prefixed header lines carrying "key: value" metadata (label,
//       n_modes, units -- units is mandatory), then the covariance rows,
//       a blank line, and the uncertainty rows.
//
// Writers emit full-precision decimal (17 significant digits in CSV,
// shortest-round-trip in JSON), so save -> load round-trips every double
// bit-exactly.

RawCovariance parse_covariance_json(const std::string& text);
std::string format_covariance_json(const CovarianceState& state);

RawCovariance parse_covariance_csv(const std::string& text);
std::string format_covariance_csv(const CovarianceState& state);

/// Dispatch on extension: .json / .csv.
CovarianceState load_covariance(const std::string& path);
void save_covariance(const CovarianceState& state, const std::string& path);

}  // namespace gwit

#endif  // GWIT_MODEL_HPP
