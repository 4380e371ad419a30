#include "gwit/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "gwit/errors.hpp"
#include "gwit/rng.hpp"
#include "gwit/symplectic.hpp"

namespace gwit {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int resolve_thread_count(int requested, size_t jobs) {
  int threads = requested;
  if (threads <= 0) {
    if (const char* env = std::getenv("GWIT_THREADS")) {
      try {
        size_t used = 0;
        threads = std::stoi(env, &used);
        if (used != std::string(env).size() || threads < 1)
          throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw InputError("GWIT_THREADS must be a positive integer, got \"" +
                         std::string(env) + "\"");
      }
    } else {
      threads = static_cast<int>(std::thread::hardware_concurrency());
      if (threads < 1) threads = 1;
    }
  }
  return std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
}

}  // namespace

std::vector<SeparabilityTarget> default_targets(int n_modes,
                                                bool include_all_individual) {
  std::vector<SeparabilityTarget> targets;
  for (int k = 1; k <= n_modes; ++k)
    targets.push_back(SeparabilityTarget::convex_k(k));
  if (n_modes <= 8 || include_all_individual) {
    for (int k = 1; k <= n_modes; ++k)
      for (Partition& p : enumerate_k_partitions(n_modes, k))
        targets.push_back(SeparabilityTarget::individual(std::move(p)));
  }
  return targets;
}

AnalysisResult analyze(const CovarianceState& state,
                       const AnalysisRequest& request) {
  std::vector<SeparabilityTarget> targets =
      request.targets.empty()
          ? default_targets(state.n_modes(), request.include_all_individual)
          : request.targets;
  if (targets.empty()) throw InputError("analyze: no targets");

  AnalysisResult result;
  result.label = state.label();
  result.n_modes = state.n_modes();
  result.purity = purity(state);
  result.physicality_margin = physicality_margin(state);
  result.targets.resize(targets.size());

  // Each target gets its own seed derived from its position, so results do
  // not depend on the thread schedule, only on the request.
  const int thread_count = resolve_thread_count(request.threads, targets.size());
  std::atomic<size_t> cursor{0};
  std::vector<std::exception_ptr> failures(targets.size());

  auto worker = [&] {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= targets.size()) return;
      try {
        GaConfig config = request.ga;
        config.target = targets[i];
        config.rng_seed = mix_seed(request.ga.rng_seed, i);
        GaResult ga = minimize(state, config);
        TargetResult& out = result.targets[i];
        out.target = targets[i];
        out.verdict = std::move(ga.best_verdict);
        out.seed = config.rng_seed;
        out.evaluations = ga.evaluations;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& failure : failures)
    if (failure) std::rethrow_exception(failure);
  return result;
}

std::string format_report_json(const AnalysisResult& result,
                               const std::string& timestamp) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["generated_at"] = timestamp;
  ordered_json input;
  input["label"] = result.label;
  input["n_modes"] = result.n_modes;
  input["purity"] = result.purity;
  input["physicality_margin"] = result.physicality_margin;
  doc["input"] = std::move(input);
  ordered_json targets = ordered_json::array();
  for (const TargetResult& t : result.targets) {
    ordered_json entry;
    entry["target"] = t.target.format();
    if (t.verdict.infinite_significance)
      entry["sigma"] = t.verdict.sigma < 0 ? "-inf" : "+inf";
    else
      entry["sigma"] = t.verdict.sigma;
    entry["infinite_significance"] = t.verdict.infinite_significance;
    entry["g_min"] = t.verdict.g_min;
    entry["expectation"] = t.verdict.expectation;
    entry["error"] = t.verdict.error;
    entry["argmin_partition"] = t.verdict.argmin_partition.format();
    entry["seed"] = t.seed;
    entry["evaluations"] = t.evaluations;
    targets.push_back(std::move(entry));
  }
  doc["targets"] = std::move(targets);
  return doc.dump(2) + "\n";
}

std::string format_partition_csv(const AnalysisResult& result) {
  std::vector<const TargetResult*> rows;
  for (const TargetResult& t : result.targets)
    if (t.target.is_individual()) rows.push_back(&t);
  std::sort(rows.begin(), rows.end(),
            [](const TargetResult* a, const TargetResult* b) {
              const auto key = [](const TargetResult* t) {
                return std::make_pair(t->verdict.sigma,
                                      t->target.partition().format());
              };
              return key(a) < key(b);
            });
  std::string out = "partition,k,sigma,g_min,expectation,error\n";
  for (const TargetResult* t : rows) {
    const Partition& p = t->target.partition();
    const std::string text = p.format();
    // Multi-mode blocks put commas inside the field; quote per RFC 4180.
    if (text.find(',') != std::string::npos)
      out += '"' + text + '"';
    else
      out += text;
    out += ',' + std::to_string(p.block_count());
    out += ',' + format_double(t->verdict.sigma);
    out += ',' + format_double(t->verdict.g_min);
    out += ',' + format_double(t->verdict.expectation);
    out += ',' + format_double(t->verdict.error);
    out += '\n';
  }
  return out;
}

namespace {

void compare_json(const ordered_json& a, const ordered_json& b,
                  const std::string& path, double tolerance,
                  std::vector<ReportDifference>& out) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>();
    const double y = b.get<double>();
    const double limit =
        tolerance * std::max({1.0, std::abs(x), std::abs(y)});
    if (!(std::abs(x - y) <= limit))
      out.push_back({path, format_double(x) + " vs " + format_double(y)});
    return;
  }
  if (a.type() != b.type()) {
    out.push_back({path, std::string(a.type_name()) + " vs " + b.type_name()});
    return;
  }
  if (a.is_object()) {
    for (const auto& [key, value] : a.items()) {
      if (key == "generated_at") continue;  // timestamps may differ
      if (!b.contains(key)) {
        out.push_back({path + "/" + key, "missing on right"});
        continue;
      }
      compare_json(value, b.at(key), path + "/" + key, tolerance, out);
    }
    for (const auto& [key, value] : b.items())
      if (!a.contains(key))
        out.push_back({path + "/" + key, "missing on left"});
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size())
      out.push_back({path, std::to_string(a.size()) + " vs " +
                               std::to_string(b.size()) + " elements"});
    const size_t common = std::min(a.size(), b.size());
    for (size_t i = 0; i < common; ++i)
      compare_json(a[i], b[i], path + "/" + std::to_string(i), tolerance, out);
    return;
  }
  if (a != b)
    out.push_back({path, a.dump() + " vs " + b.dump()});
}

}  // namespace

std::vector<ReportDifference> report_check(const std::string& report_a,
                                           const std::string& report_b,
                                           double tolerance) {
  ordered_json a, b;
  try {
    a = ordered_json::parse(report_a);
    b = ordered_json::parse(report_b);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("report JSON: ") + e.what());
  }
  std::vector<ReportDifference> out;
  compare_json(a, b, "", tolerance, out);
  return out;
}

}  // namespace gwit
