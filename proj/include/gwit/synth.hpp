#ifndef GWIT_SYNTH_HPP
#define GWIT_SYNTH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gwit/model.hpp"
#include "gwit/partitions.hpp"

namespace gwit {

// Synthetic covariance fixtures.  Every constructor returns a state in
// internal units that passes validate() cleanly (physicality included);
// uncertainties default to zero and are attached afterwards with
// CovarianceState::with_uniform_uncertainty().

/// N-mode vacuum: C = I/2.
CovarianceState vacuum_state(int n_modes);

/// Independently squeezed modes; db[j] is the x_j noise level in dB relative
/// to vacuum (negative = squeezed), so Var(x_j) = (1/2) 10^(db_j/10) and
/// Var(p_j) = (1/2) 10^(-db_j/10).
CovarianceState squeezed_supermodes(const std::vector<double>& db);

/// Haar-random passive (orthogonal-symplectic) mixer, the image of a random
/// N x N unitary X + iY under U |-> [[X, Y], [-Y, X]].
Eigen::MatrixXd random_passive_symplectic(int n_modes, std::uint64_t seed);

/// Single-mode squeezers: x_j -> e^(-r_j) x_j, p_j -> e^(+r_j) p_j.
Eigen::MatrixXd squeezer_symplectic(const std::vector<double>& r);

/// Two-mode squeezer on modes (i, j), identity elsewhere.
Eigen::MatrixXd two_mode_squeezer_symplectic(int n_modes, int i, int j,
                                             double r);

/// C -> S C S^T, DeltaC -> |S| DeltaC |S|^T (worst-case linear propagation).
/// Requires S symplectic within 1e-10.
CovarianceState apply_symplectic(const Eigen::MatrixXd& s,
                                 const CovarianceState& state);

/// Two-mode squeezed vacuum embedded in n modes:
///   x block on (i, j): (1/2) [[cosh 2r, sinh 2r], [sinh 2r, cosh 2r]],
///   p block the same with -sinh 2r off-diagonal; vacuum elsewhere.
CovarianceState two_mode_squeezed(int n_modes, int i, int j, double r);

/// Convex mixture: C = sum_i w_i C_i, DeltaC = sum_i w_i DeltaC_i.  Weights
/// must be positive and sum to 1 within 1e-9.  When `part_partitions` is
/// given (the partition each part is separable for), the label records the
/// guaranteed separability class: every part K-partition-separable implies
/// the mixture is K'-separable for K' = min_i block_count(P_i).
CovarianceState mixture_covariance(
    const std::vector<double>& weights,
    const std::vector<CovarianceState>& parts,
    const std::optional<std::vector<Partition>>& part_partitions =
        std::nullopt);

struct SpopoParams {
  int n_modes = 6;
  /// Per-supermode squeezing in dB; defaults to a linear ramp over
  /// [-2.6, +3.0] when empty.
  std::vector<double> db;
  std::uint64_t mixing_seed = 1;
  /// Uniform thermal factor applied to the supermode covariance before
  /// mixing (C -> nu C); nu = 1 keeps the state pure, nu > 1 makes purity
  /// < 1.  Must be >= 1.
  double impurity = 1.0;
  double delta_c = 1e-3;  // uniform measurement uncertainty
};

/// Qualitative stand-in for a multimode frequency-comb measurement:
/// squeezed supermodes, thermal impurity, then a seeded random passive
/// mixer.  Not a reproduction of any measured data set.
CovarianceState spopo_like(const SpopoParams& params);

}  // namespace gwit

#endif  // GWIT_SYNTH_HPP
