#include "gwit/witness.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "gwit/errors.hpp"
#include "gwit/symplectic.hpp"

namespace gwit {
namespace {

void check_same_modes(int op_modes, int state_modes) {
  if (op_modes != state_modes)
    throw InputError("test operator has " + std::to_string(op_modes) +
                     " modes but state has " + std::to_string(state_modes));
}

}  // namespace

SeparabilityTarget::SeparabilityTarget(std::variant<int, Partition> v)
    : value_(std::move(v)) {}

SeparabilityTarget SeparabilityTarget::individual(Partition partition) {
  return SeparabilityTarget(std::variant<int, Partition>(std::move(partition)));
}

SeparabilityTarget SeparabilityTarget::convex_k(int k) {
  if (k < 1) throw InputError("separability target: K must be >= 1");
  return SeparabilityTarget(std::variant<int, Partition>(k));
}

SeparabilityTarget SeparabilityTarget::parse(std::string_view text,
                                             int n_modes) {
  if (text.rfind("K=", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(std::string(text.substr(2)));
    } catch (const std::exception&) {
      throw InputError("separability target: bad K in \"" +
                       std::string(text) + "\"");
    }
    if (k < 1 || k > n_modes)
      throw InputError("separability target: K=" + std::to_string(k) +
                       " out of range 1.." + std::to_string(n_modes));
    return convex_k(k);
  }
  if (text.rfind("partition=", 0) == 0)
    return individual(Partition::parse(text.substr(10), n_modes));
  throw InputError("separability target: expected \"K=<int>\" or "
                   "\"partition=<blocks>\", got \"" +
                   std::string(text) + "\"");
}

std::string SeparabilityTarget::format() const {
  if (is_individual()) return "partition=" + partition().format();
  return "K=" + std::to_string(k());
}

bool SeparabilityTarget::is_individual() const {
  return std::holds_alternative<Partition>(value_);
}

const Partition& SeparabilityTarget::partition() const {
  return std::get<Partition>(value_);
}

int SeparabilityTarget::k() const { return std::get<int>(value_); }

bool SeparabilityTarget::operator==(const SeparabilityTarget& other) const {
  return value_ == other.value_;
}

SubsetScoreCache::SubsetScoreCache(TestOperator op) : op_(std::move(op)) {}

double SubsetScoreCache::block_score(std::uint32_t mask) const {
  const int n = op_.n_modes();
  if (mask == 0 || (mask >> n) != 0)
    throw InputError("block score: mode mask out of range");
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = scores_.find(mask);
    if (it != scores_.end()) return it->second;
  }

  std::vector<int> modes;
  for (int i = 0; i < n; ++i)
    if (mask & (std::uint32_t{1} << i)) modes.push_back(i);
  const int m = static_cast<int>(modes.size());
  const Eigen::MatrixXd& full = op_.matrix();

  double score = 0.0;
  if (m == 1) {
    const int i = modes[0];
    const double a = full(i, i);
    const double b = full(n + i, n + i);
    const double c = full(i, n + i);
    const double det = a * b - c * c;
    if (a <= 0.0 || det <= 0.0)
      throw InadmissibleOperatorError(
          "block score: single-mode block " + std::to_string(i + 1) +
          " is singular");
    score = std::sqrt(det);
  } else {
    // Sub-matrix on rows/columns {i, i+N : i in block}, keeping the
    // x..x p..p layout so the block's own symplectic form is standard.
    Eigen::MatrixXd sub(2 * m, 2 * m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        sub(r, c) = full(modes[static_cast<size_t>(r)],
                         modes[static_cast<size_t>(c)]);
        sub(r, m + c) = full(modes[static_cast<size_t>(r)],
                             n + modes[static_cast<size_t>(c)]);
        sub(m + r, c) = full(n + modes[static_cast<size_t>(r)],
                             modes[static_cast<size_t>(c)]);
        sub(m + r, m + c) = full(n + modes[static_cast<size_t>(r)],
                                 n + modes[static_cast<size_t>(c)]);
      }
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success)
      throw InadmissibleOperatorError(
          "block score: sub-block is not strictly positive definite");
    score = symplectic_eigenvalues(sub).sum();
  }

  std::lock_guard<std::mutex> lock(mu_);
  scores_.emplace(mask, score);
  return score;
}

double expectation(const TestOperator& op, const CovarianceState& state) {
  check_same_modes(op.n_modes(), state.n_modes());
  return (op.matrix().array() * state.matrix().array()).sum();
}

double expectation_error(const TestOperator& op,
                         const CovarianceState& state) {
  check_same_modes(op.n_modes(), state.n_modes());
  const Eigen::MatrixXd& m = op.matrix();
  const Eigen::MatrixXd& dc = state.uncertainty();
  double sum_sq = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) {
      const double w = (i == j) ? m(i, i) : 2.0 * m(i, j);
      const double term = w * dc(i, j);
      sum_sq += term * term;
    }
  return std::sqrt(sum_sq);
}

double g_min_individual(const SubsetScoreCache& cache,
                        const Partition& partition) {
  if (partition.n_modes() != cache.test_operator().n_modes())
    throw InputError("partition mode count does not match test operator");
  double total = 0.0;
  for (int j = 0; j < partition.block_count(); ++j)
    total += cache.block_score(partition.block_mask(j));
  return total;
}

GMinKResult g_min_k(const SubsetScoreCache& cache, int n_modes, int k) {
  if (n_modes != cache.test_operator().n_modes())
    throw InputError("mode count does not match test operator");
  KPartitionEnumerator scan(n_modes, k);
  std::vector<std::uint32_t> masks;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> best_rgs;
  while (scan.next_masks(masks)) {
    double total = 0.0;
    for (std::uint32_t mask : masks) total += cache.block_score(mask);
    if (total < best) {  // strict: ties keep the canonical-order first
      best = total;
      best_rgs = scan.current_rgs();
    }
  }
  GMinKResult result;
  result.value = best;
  result.argmin = KPartitionEnumerator::from_rgs(n_modes, best_rgs);
  return result;
}

WitnessVerdict verdict(const SubsetScoreCache& cache,
                       const CovarianceState& state,
                       const SeparabilityTarget& target) {
  const TestOperator& op = cache.test_operator();
  check_same_modes(op.n_modes(), state.n_modes());

  WitnessVerdict out;
  out.expectation = expectation(op, state);
  out.error = expectation_error(op, state);
  if (target.is_individual()) {
    out.g_min = g_min_individual(cache, target.partition());
    out.argmin_partition = target.partition();
  } else {
    if (target.k() > state.n_modes())
      throw InputError("separability target K=" + std::to_string(target.k()) +
                       " exceeds the state's " +
                       std::to_string(state.n_modes()) + " modes");
    GMinKResult g = g_min_k(cache, state.n_modes(), target.k());
    out.g_min = g.value;
    out.argmin_partition = std::move(g.argmin);
  }

  const double numerator = out.expectation - out.g_min;
  if (out.error > 0.0) {
    out.sigma = numerator / out.error;
  } else if (numerator == 0.0) {
    out.sigma = 0.0;
  } else {
    // Zero measurement error with a nonzero numerator: the significance is
    // not a finite number of standard deviations.
    out.infinite_significance = true;
    out.sigma = numerator < 0.0 ? -std::numeric_limits<double>::infinity()
                                : std::numeric_limits<double>::infinity();
  }
  return out;
}

WitnessVerdict verdict(const TestOperator& op, const CovarianceState& state,
                       const SeparabilityTarget& target) {
  SubsetScoreCache cache(op);
  return verdict(cache, state, target);
}

}  // namespace gwit
