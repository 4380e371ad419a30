#ifndef GWIT_WITNESS_HPP
#define GWIT_WITNESS_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>

#include "gwit/model.hpp"
#include "gwit/partitions.hpp"

namespace gwit {

/// What to test against: one fixed mode partition, or the convex hull of all
/// partitions with exactly K blocks (K-separability).  K = 1 degenerates to
/// the plain uncertainty relation, i.e. a physicality check.
class SeparabilityTarget {
 public:
  static SeparabilityTarget individual(Partition partition);
  static SeparabilityTarget convex_k(int k);

  /// "K=3" or "partition=1,2:3" (1-based).
  static SeparabilityTarget parse(std::string_view text, int n_modes);
  std::string format() const;

  bool is_individual() const;
  bool is_convex_k() const { return !is_individual(); }
  const Partition& partition() const;  // individual targets only
  int k() const;                       // convex-K targets only

  bool operator==(const SeparabilityTarget& other) const;

 private:
  explicit SeparabilityTarget(std::variant<int, Partition> v);
  std::variant<int, Partition> value_;
};

/// Memoized per-block bound evaluations for one test operator.  Keyed by the
/// mode bitmask of the block; concurrent lookups are serialized internally.
/// A cache is bound to its operator at construction, which rules out reusing
/// scores across different M.
class SubsetScoreCache {
 public:
  explicit SubsetScoreCache(TestOperator op);

  const TestOperator& test_operator() const { return op_; }

  /// Sum of symplectic eigenvalues of M restricted to the modes in `mask`
  /// (rows/columns {i, i+N} for each mode i).  Throws
  /// InadmissibleOperatorError if that sub-block is singular.
  double block_score(std::uint32_t mask) const;

 private:
  TestOperator op_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint32_t, double> scores_;
};

/// <L> = trace(M C).
double expectation(const TestOperator& op, const CovarianceState& state);

/// First-order error propagation through <L> = sum_ij M_ij C_ij with
/// independent entry errors; the i<j and j>i terms are identical, hence
/// weight 2 M_ij off the diagonal:
///   Delta<L> = sqrt( sum_{i<=j} (w_ij DeltaC_ij)^2 ),  w_ii = M_ii,
///   w_ij = 2 M_ij.
double expectation_error(const TestOperator& op, const CovarianceState& state);

/// Separability bound for one fixed partition: sum of block scores.
double g_min_individual(const SubsetScoreCache& cache,
                        const Partition& partition);

/// Bound for K-separability: minimum of g_min_individual over all
/// K-partitions, with the first minimizer in canonical enumeration order.
struct GMinKResult {
  double value = 0.0;
  Partition argmin = Partition::trivial(1);
};
GMinKResult g_min_k(const SubsetScoreCache& cache, int n_modes, int k);

/// Outcome of testing one state against one target with one operator.
/// sigma = (<L> - g_min) / Delta<L>; sigma < 0 certifies the corresponding
/// entanglement class at |sigma| standard deviations, sigma >= 0 means no
/// detection (it never proves separability).
struct WitnessVerdict {
  double expectation = 0.0;
  double error = 0.0;
  double g_min = 0.0;
  double sigma = 0.0;
  /// Set when Delta<L> = 0 with a nonzero numerator; sigma then carries
  /// +-infinity and must not be treated as a significance in units of
  /// standard deviations.
  bool infinite_significance = false;
  Partition argmin_partition = Partition::trivial(1);
};

WitnessVerdict verdict(const TestOperator& op, const CovarianceState& state,
                       const SeparabilityTarget& target);

/// As above but reusing a caller-owned cache (the optimizer's hot path).
/// `cache` must have been built from `op`.
WitnessVerdict verdict(const SubsetScoreCache& cache,
                       const CovarianceState& state,
                       const SeparabilityTarget& target);

}  // namespace gwit

#endif  // GWIT_WITNESS_HPP
