#ifndef GWIT_REPORT_HPP
#define GWIT_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gwit/model.hpp"
#include "gwit/optimizer.hpp"
#include "gwit/witness.hpp"

namespace gwit {

/// One analysis request: which targets to optimize over, with which GA
/// settings, on how many worker threads.
struct AnalysisRequest {
  /// Empty means the default sweep: K = 1..N, plus every individual
  /// partition when N <= 8 or include_all_individual is set.
  std::vector<SeparabilityTarget> targets;
  GaConfig ga;  // ga.target is ignored; one target per entry above
  int threads = 0;       // 0: GWIT_THREADS env, else hardware concurrency
  bool include_all_individual = false;
};

struct TargetResult {
  SeparabilityTarget target = SeparabilityTarget::convex_k(1);
  WitnessVerdict verdict;
  std::uint64_t seed = 0;  // per-target stream seed actually used
  std::int64_t evaluations = 0;
};

struct AnalysisResult {
  std::string label;
  int n_modes = 0;
  double purity = 0.0;
  double physicality_margin = 0.0;
  std::vector<TargetResult> targets;
};

/// Expand the request's target list (applying the default sweep), run the
/// optimizer once per target on a bounded worker pool, and assemble results
/// in target order.  Deterministic for fixed inputs and seed: target i uses
/// stream seed mix_seed(ga.rng_seed, i) regardless of thread schedule.
AnalysisResult analyze(const CovarianceState& state,
                       const AnalysisRequest& request);

/// JSON report, schema_version 1.  Key order is fixed; all doubles print
/// with 17 significant digits, so identical analyses give byte-identical
/// text except for the "generated_at" field.
std::string format_report_json(const AnalysisResult& result,
                               const std::string& timestamp);

/// Per-partition table, ascending sigma: partition,k,sigma,g_min,
/// expectation,error.  Covers the individual-partition targets only.
std::string format_partition_csv(const AnalysisResult& result);

struct ReportDifference {
  std::string path;  // JSON pointer-ish location
  std::string detail;
};

/// Structural comparison of two report JSON texts.  Numeric leaves compare
/// with |a-b| <= tol * max(1, |a|, |b|); "generated_at" is skipped.
/// Returns the differences beyond tolerance.
std::vector<ReportDifference> report_check(const std::string& report_a,
                                           const std::string& report_b,
                                           double tolerance);

/// Default target sweep for an N-mode state (see AnalysisRequest).
std::vector<SeparabilityTarget> default_targets(int n_modes,
                                                bool include_all_individual);

}  // namespace gwit

#endif  // GWIT_REPORT_HPP
