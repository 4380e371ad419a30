#ifndef GWIT_OPTIMIZER_HPP
#define GWIT_OPTIMIZER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gwit/model.hpp"
#include "gwit/witness.hpp"

namespace gwit {

/// Search-space point: the packed lower triangle of a 2N x 2N factor G.
/// decode() forms M = (G G^T + eps I) / trace(G G^T + eps I), which is
/// positive definite with unit trace for every gene vector, so the genetic
/// search never leaves the admissible operator set.  Genes are clamped to
/// [-8, 8]: the objective is invariant under M -> cM, so unbounded factor
/// growth is pure neutral drift, and the bound keeps eps I a meaningful
/// definiteness floor.
class Genome {
 public:
  Genome(int n_modes, std::vector<double> genes);

  static Genome identity(int n_modes);
  static int gene_count(int n_modes) { return n_modes * (2 * n_modes + 1); }
  static constexpr double kGeneBound = 8.0;
  static constexpr double kEps = 1e-8;

  TestOperator decode() const;

  int n_modes() const { return n_modes_; }
  const std::vector<double>& genes() const { return genes_; }
  std::vector<double>& genes() { return genes_; }

 private:
  int n_modes_ = 0;
  std::vector<double> genes_;
};

struct GaConfig {
  SeparabilityTarget target = SeparabilityTarget::convex_k(1);
  int population_size = 64;
  int generations = 400;
  int tournament_size = 3;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;       // BLX-alpha crossover width
  double mutation_rate = 0.15;    // per gene
  double mutation_sigma = 0.1;    // halved after each 50 stale generations
  int elite_count = 2;
  int restarts = 4;               // restart 0 seeds the identity genome
  std::uint64_t rng_seed = 0;     // no default stream: always set explicitly

  /// Parse hyperparameters (and optionally "target") from a JSON object;
  /// unknown keys are an InputError.
  static GaConfig from_json(const std::string& text, int n_modes);
  void check() const;  // throws InputError on out-of-range values
};

struct GaResult {
  Genome best_genome;
  TestOperator best_operator;
  WitnessVerdict best_verdict;
  /// Best sigma seen so far, recorded once per generation across all
  /// restarts; non-increasing by construction.
  std::vector<double> history;
  std::int64_t evaluations = 0;
};

/// sigma of the decoded operator against config.target; the GA's fitness.
double objective(const Genome& genome, const CovarianceState& state,
                 const SeparabilityTarget& target);

/// Seeded, single-threaded genetic minimization of sigma over test
/// operators.  Deterministic for a fixed (state, config); the returned best
/// sigma never exceeds the identity-genome baseline, which restart 0 always
/// evaluates.
GaResult minimize(const CovarianceState& state, const GaConfig& config);

}  // namespace gwit

#endif  // GWIT_OPTIMIZER_HPP
