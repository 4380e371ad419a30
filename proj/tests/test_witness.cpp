#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "gwit/errors.hpp"
#include "gwit/model.hpp"
#include "gwit/partitions.hpp"
#include "gwit/rng.hpp"
#include "gwit/symplectic.hpp"
#include "gwit/synth.hpp"
#include "gwit/witness.hpp"

using namespace gwit;

namespace {

// x-block [[1,-1],[-1,1]], p-block [[1,1],[1,1]]: the operator whose
// expectation is Var(x1 - x2) + Var(p1 + p2).
Eigen::MatrixXd epr_matrix() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m.topLeftCorner(2, 2) << 1, -1, -1, 1;
  m.bottomRightCorner(2, 2) << 1, 1, 1, 1;
  return m;
}

TestOperator random_admissible_op(int n_modes, Rng& rng) {
  Eigen::MatrixXd g(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < 2 * n_modes; ++i)
    for (int j = 0; j < 2 * n_modes; ++j) g(i, j) = rng.normal();
  return TestOperator::from_positive_factor(g, 1e-8);
}

}  // namespace

TEST_CASE("target parsing and formatting") {
  const auto k3 = SeparabilityTarget::parse("K=3", 6);
  CHECK(k3.is_convex_k());
  CHECK(k3.k() == 3);
  CHECK(k3.format() == "K=3");

  const auto indiv = SeparabilityTarget::parse("partition=1,2:3", 3);
  CHECK(indiv.is_individual());
  CHECK(indiv.partition() == Partition(3, {{0, 1}, {2}}));
  CHECK(SeparabilityTarget::parse(indiv.format(), 3) == indiv);

  CHECK_THROWS_AS(SeparabilityTarget::parse("K=0", 3), InputError);
  CHECK_THROWS_AS(SeparabilityTarget::parse("K=4", 3), InputError);
  CHECK_THROWS_AS(SeparabilityTarget::parse("K=x", 3), InputError);
  CHECK_THROWS_AS(SeparabilityTarget::parse("partition=1,2", 3), InputError);
  CHECK_THROWS_AS(SeparabilityTarget::parse("k=2", 3), InputError);
}

TEST_CASE("expectation and error closed forms") {
  // <L> for M = I on the N-mode vacuum is N; a uniform entry uncertainty
  // delta only hits the diagonal weights, so DeltaL = delta sqrt(2N).
  for (int n : {1, 2, 4}) {
    const auto op =
        TestOperator::from_matrix(Eigen::MatrixXd::Identity(2 * n, 2 * n));
    const auto state = vacuum_state(n).with_uniform_uncertainty(1e-3);
    CHECK(expectation(op, state) == doctest::Approx(n).epsilon(1e-14));
    CHECK(expectation_error(op, state) ==
          doctest::Approx(1e-3 * std::sqrt(2.0 * n)).epsilon(1e-14));
  }

  // Off-diagonal entries count twice (M_ij and M_ji both multiply C_ij).
  const auto epr = TestOperator::from_matrix(epr_matrix());
  const auto noisy = vacuum_state(2).with_uniform_uncertainty(1e-3);
  CHECK(expectation_error(epr, noisy) ==
        doctest::Approx(std::sqrt(12.0) * 1e-3).epsilon(1e-14));
}

TEST_CASE("block scores match the symplectic spectrum") {
  Rng rng(555);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial % 3;
    const auto op = random_admissible_op(n, rng);
    const SubsetScoreCache cache(op);

    // Full mask: sum of all symplectic eigenvalues of M.
    const std::uint32_t full = (1u << n) - 1u;
    const double direct = symplectic_eigenvalues(op.matrix()).sum();
    CHECK(cache.block_score(full) == doctest::Approx(direct).epsilon(1e-10));

    // Singletons: sqrt(det) of the per-mode 2x2 block.
    for (int i = 0; i < n; ++i) {
      const auto& m = op.matrix();
      const double det = m(i, i) * m(n + i, n + i) - m(i, n + i) * m(n + i, i);
      CHECK(cache.block_score(1u << i) ==
            doctest::Approx(std::sqrt(det)).epsilon(1e-12));
    }

    // A two-mode subset scored in place equals the spectrum of the gathered
    // submatrix.
    if (n >= 3) {
      const int a = 0, b = 2;
      Eigen::MatrixXd sub(4, 4);
      const int rows[4] = {a, b, n + a, n + b};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) sub(r, c) = op.matrix()(rows[r], rows[c]);
      CHECK(cache.block_score((1u << a) | (1u << b)) ==
            doctest::Approx(symplectic_eigenvalues(sub).sum()).epsilon(1e-10));
    }
  }
}

TEST_CASE("cache returns identical values on repeat lookups") {
  Rng rng(99);
  const auto op = random_admissible_op(4, rng);
  const SubsetScoreCache cache(op);
  for (std::uint32_t mask = 1; mask < 16; ++mask) {
    const double first = cache.block_score(mask);
    CHECK(cache.block_score(mask) == first);  // bit-exact memoization
  }
  CHECK_THROWS_AS(cache.block_score(0), InputError);
  CHECK_THROWS_AS(cache.block_score(1u << 4), InputError);
}

TEST_CASE("g_min_k equals a brute-force scan over all K-partitions") {
  Rng rng(2026);
  const int n = 6;
  const auto op = random_admissible_op(n, rng);
  const SubsetScoreCache cache(op);

  for (int k = 1; k <= n; ++k) {
    double best = std::numeric_limits<double>::infinity();
    Partition best_partition = Partition::trivial(n);
    for (const Partition& p : enumerate_k_partitions(n, k)) {
      const double score = g_min_individual(cache, p);
      if (score < best) {
        best = score;
        best_partition = p;
      }
    }
    const GMinKResult got = g_min_k(cache, n, k);
    CHECK(got.value == best);  // same cache, same arithmetic: bit-exact
    CHECK(got.argmin == best_partition);
  }
}

TEST_CASE("tied minima resolve to the first partition in canonical order") {
  // M = I scores every partition of 3 modes identically, so the argmin must
  // be the enumeration head.
  const auto op = TestOperator::from_matrix(Eigen::MatrixXd::Identity(6, 6));
  const SubsetScoreCache cache(op);
  const GMinKResult got = g_min_k(cache, 3, 2);
  CHECK(got.argmin == Partition(3, {{0, 1}, {2}}));
  CHECK(got.value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("bounds grow with K and are dominated by every individual cut") {
  Rng rng(771);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4 + trial % 2;
    const auto op = random_admissible_op(n, rng);
    const SubsetScoreCache cache(op);
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
      const double g = g_min_k(cache, n, k).value;
      CHECK(g >= prev - 1e-12);
      prev = g;
      for (const Partition& p : enumerate_k_partitions(n, k))
        CHECK(g <= g_min_individual(cache, p) + 1e-12);
    }
  }
}

TEST_CASE("EPR operator certifies the two-mode squeezed state") {
  const double r = 0.5;
  const auto op = TestOperator::from_matrix(epr_matrix());
  const auto state = two_mode_squeezed(2, 0, 1, r).with_uniform_uncertainty(1e-3);
  const auto target =
      SeparabilityTarget::individual(Partition(2, {{0}, {1}}));
  const WitnessVerdict v = verdict(op, state, target);

  // 2 e^{-2r} with r = 1/2, frozen to full precision.
  CHECK(v.expectation == doctest::Approx(0.73575888234288467).epsilon(1e-12));
  CHECK(v.error == doctest::Approx(3.4641016151377546e-3).epsilon(1e-12));
  CHECK(v.g_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(v.sigma ==
        doctest::Approx((2.0 * std::exp(-1.0) - 2.0) / (std::sqrt(12.0) * 1e-3))
            .epsilon(1e-12));
  CHECK(v.sigma < -300.0);
  CHECK(!v.infinite_significance);
  CHECK(v.argmin_partition == Partition(2, {{0}, {1}}));
}

TEST_CASE("significance is invariant under scaling the operator") {
  Rng rng(4242);
  const int n = 4;
  const auto state =
      spopo_like({.n_modes = n, .db = {-2.0, -1.0, 1.0, 2.0}, .mixing_seed = 7,
                  .impurity = 1.05, .delta_c = 1e-3});
  const auto op = random_admissible_op(n, rng);
  const auto scaled = TestOperator::from_matrix(3.75 * op.matrix());
  for (int k = 1; k <= n; ++k) {
    const auto target = SeparabilityTarget::convex_k(k);
    const WitnessVerdict a = verdict(op, state, target);
    const WitnessVerdict b = verdict(scaled, state, target);
    CHECK(a.sigma == doctest::Approx(b.sigma).epsilon(1e-9));
    CHECK(a.argmin_partition == b.argmin_partition);
  }
}

TEST_CASE("cache and operator entry points agree") {
  Rng rng(31);
  const auto op = random_admissible_op(3, rng);
  const auto state = spopo_like({.n_modes = 3, .db = {-2.0, 0.5, 1.5}});
  const SubsetScoreCache cache(op);
  for (int k = 1; k <= 3; ++k) {
    const auto target = SeparabilityTarget::convex_k(k);
    const WitnessVerdict a = verdict(op, state, target);
    const WitnessVerdict b = verdict(cache, state, target);
    CHECK(a.sigma == b.sigma);
    CHECK(a.g_min == b.g_min);
    CHECK(a.expectation == b.expectation);
    CHECK(a.error == b.error);
  }
}

TEST_CASE("singular sub-blocks are inadmissible, not silently skipped") {
  // The exact EPR matrix is singular as a whole, so any bound over the joint
  // block {1,2} would be vacuous; scoring it must fail loudly.
  const auto op = TestOperator::from_matrix(epr_matrix());
  const SubsetScoreCache cache(op);
  CHECK_NOTHROW(cache.block_score(0b01));
  CHECK_NOTHROW(cache.block_score(0b10));
  CHECK_THROWS_AS(cache.block_score(0b11), InadmissibleOperatorError);

  const auto state = two_mode_squeezed(2, 0, 1, 0.5);
  CHECK_THROWS_AS(
      verdict(op, state, SeparabilityTarget::convex_k(1)),
      InadmissibleOperatorError);
}

TEST_CASE("zero measurement error") {
  // Exact covariance, strictly negative numerator: infinite significance.
  const auto op = TestOperator::from_matrix(epr_matrix());
  const auto tms = two_mode_squeezed(2, 0, 1, 0.5);  // zero uncertainty
  const auto indiv =
      SeparabilityTarget::individual(Partition(2, {{0}, {1}}));
  const WitnessVerdict neg = verdict(op, tms, indiv);
  CHECK(neg.infinite_significance);
  CHECK(std::isinf(neg.sigma));
  CHECK(neg.sigma < 0.0);

  // Positive numerator: +infinity, still flagged.
  const auto wide = CovarianceState::from_raw({.label = "thermal",
                                               .n_modes = 2,
                                               .units = UnitConvention::kVacuumHalf,
                                               .matrix = Eigen::MatrixXd::Identity(4, 4),
                                               .uncertainty = Eigen::MatrixXd::Zero(4, 4)});
  const auto identity_op =
      TestOperator::from_matrix(Eigen::MatrixXd::Identity(4, 4));
  const WitnessVerdict pos = verdict(identity_op, wide, indiv);
  CHECK(pos.infinite_significance);
  CHECK(pos.sigma > 0.0);
  CHECK(std::isinf(pos.sigma));

  // Exactly saturated: sigma = 0 without the flag.  Single mode keeps every
  // quantity in closed form, so the numerator is exactly zero.
  const auto one_mode_op =
      TestOperator::from_matrix(Eigen::MatrixXd::Identity(2, 2));
  const WitnessVerdict flat =
      verdict(one_mode_op, vacuum_state(1), SeparabilityTarget::convex_k(1));
  CHECK(flat.sigma == 0.0);
  CHECK(!flat.infinite_significance);
}

TEST_CASE("mode count mismatches are rejected") {
  const auto op = TestOperator::from_matrix(Eigen::MatrixXd::Identity(4, 4));
  CHECK_THROWS_AS(
      verdict(op, vacuum_state(3), SeparabilityTarget::convex_k(1)),
      InputError);
  CHECK_THROWS_AS(
      verdict(op, vacuum_state(2),
              SeparabilityTarget::individual(Partition(3, {{0}, {1}, {2}}))),
      InputError);
}
