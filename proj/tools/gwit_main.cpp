// gwit: detect multipartite entanglement classes in Gaussian covariance
// matrices via optimized second-moment witnesses.
#include <CLI11.hpp>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gwit/errors.hpp"
#include "gwit/model.hpp"
#include "gwit/report.hpp"
#include "gwit/synth.hpp"

namespace {

std::string iso_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gwit::InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gwit::InputError("cannot write " + path);
  out << text;
}

struct AnalyzeOptions {
  std::string input;
  std::vector<std::string> targets;
  std::string out;
  std::string format = "json";
  std::string partition_csv;
  std::string ga_config_path;
  std::uint64_t seed = 1;
  int threads = 0;
  bool individual_all = false;
};

int run_analyze(const AnalyzeOptions& opt, const gwit::GaConfig& ga) {
  const gwit::CovarianceState state = gwit::load_covariance(opt.input);

  gwit::AnalysisRequest request;
  request.ga = ga;
  request.ga.rng_seed = opt.seed;
  request.threads = opt.threads;
  request.include_all_individual = opt.individual_all;
  for (const std::string& spec : opt.targets) {
    if (spec == "all") continue;  // empty target list = default sweep
    request.targets.push_back(
        gwit::SeparabilityTarget::parse(spec, state.n_modes()));
  }

  const gwit::AnalysisResult result = gwit::analyze(state, request);
  if (opt.format == "json") {
    write_output(opt.out,
                 gwit::format_report_json(result, iso_timestamp_utc()));
  } else if (opt.format == "csv") {
    write_output(opt.out, gwit::format_partition_csv(result));
  } else {
    throw gwit::InputError("unknown --format \"" + opt.format +
                           "\" (expected json or csv)");
  }
  if (!opt.partition_csv.empty())
    write_output(opt.partition_csv, gwit::format_partition_csv(result));
  return 0;
}

int run_validate(const std::string& input) {
  const gwit::CovarianceState state = gwit::load_covariance(input);
  const std::vector<gwit::Diagnostic> diagnostics = gwit::validate(state);
  bool has_error = false;
  for (const gwit::Diagnostic& d : diagnostics) {
    const bool is_error = d.severity == gwit::Severity::kError;
    has_error |= is_error;
    std::cout << (is_error ? "error: " : "warning: ") << d.message << "\n";
  }
  if (diagnostics.empty()) std::cout << "ok\n";
  return has_error ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-state entanglement witness toolkit"};
  app.require_subcommand(1);

  // --- analyze --------------------------------------------------------------
  AnalyzeOptions analyze_opt;
  gwit::GaConfig ga_defaults;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Optimize witnesses against separability targets");
  analyze->add_option("--input", analyze_opt.input,
                      "Covariance file (.json or .csv)")
      ->required();
  analyze
      ->add_option("--targets", analyze_opt.targets,
                   "Target spec: all, K=<int>, or partition=<blocks>; "
                   "repeatable")
      ->type_size(1);
  analyze->add_option("--out", analyze_opt.out, "Output path (default stdout)");
  analyze->add_option("--format", analyze_opt.format,
                      "Report format: json or csv");
  analyze->add_option("--partition-csv", analyze_opt.partition_csv,
                      "Also write the per-partition table here");
  analyze->add_option("--seed", analyze_opt.seed, "Base RNG seed");
  analyze->add_option("--threads", analyze_opt.threads,
                      "Worker threads (default: GWIT_THREADS or all cores)");
  analyze->add_flag("--individual-all", analyze_opt.individual_all,
                    "Sweep every individual partition even for N > 8");
  analyze->add_option("--ga-config", analyze_opt.ga_config_path,
                      "JSON file with GA hyperparameters");
  int ga_population = 0, ga_generations = 0, ga_tournament = 0, ga_elites = -1,
      ga_restarts = 0;
  double ga_crossover = -1.0, ga_blend = -1.0, ga_mutation_rate = -1.0,
         ga_mutation_sigma = 0.0;
  analyze->add_option("--ga-population", ga_population, "Population size");
  analyze->add_option("--ga-generations", ga_generations,
                      "Generations per restart");
  analyze->add_option("--ga-tournament", ga_tournament, "Tournament size");
  analyze->add_option("--ga-crossover-rate", ga_crossover, "Crossover rate");
  analyze->add_option("--ga-blend-alpha", ga_blend, "Blend crossover alpha");
  analyze->add_option("--ga-mutation-rate", ga_mutation_rate,
                      "Per-gene mutation rate");
  analyze->add_option("--ga-mutation-sigma", ga_mutation_sigma,
                      "Initial mutation sigma");
  analyze->add_option("--ga-elites", ga_elites, "Elite count");
  analyze->add_option("--ga-restarts", ga_restarts, "Restart count");

  // --- synth ----------------------------------------------------------------
  CLI::App* synth =
      app.add_subcommand("synth", "Write a built-in synthetic covariance");
  synth->require_subcommand(1);
  std::string synth_out;
  double synth_delta = 1e-3;

  int vac_n = 1;
  CLI::App* synth_vacuum = synth->add_subcommand("vacuum", "N-mode vacuum");
  synth_vacuum->add_option("--n", vac_n, "Mode count")->required();

  std::vector<double> sq_db;
  CLI::App* synth_squeezed = synth->add_subcommand(
      "squeezed", "Independently squeezed modes (x-noise in dB)");
  synth_squeezed->add_option("--db", sq_db, "Per-mode dB values")
      ->required()
      ->delimiter(',');

  double tms_r = 0.5;
  int tms_n = 2;
  std::vector<int> tms_modes{1, 2};
  CLI::App* synth_tms =
      synth->add_subcommand("tms", "Two-mode squeezed vacuum");
  synth_tms->add_option("--r", tms_r, "Squeezing parameter")->required();
  synth_tms->add_option("--n", tms_n, "Total mode count");
  synth_tms->add_option("--modes", tms_modes, "Squeezed pair (1-based)")
      ->delimiter(',')
      ->expected(2);

  double mix3_r = 1.0;
  CLI::App* synth_mix3 = synth->add_subcommand(
      "tms-mixture3",
      "Equal 3-mode mixture of the three cross-pair TMS states (biseparable)");
  synth_mix3->add_option("--r", mix3_r, "Squeezing parameter of each part");

  gwit::SpopoParams spopo;
  CLI::App* synth_spopo = synth->add_subcommand(
      "spopo-like", "Squeezed supermodes under a random passive mixer");
  synth_spopo->add_option("--n", spopo.n_modes, "Mode count");
  synth_spopo->add_option("--mixing-seed", spopo.mixing_seed,
                          "Seed of the passive mixer");
  synth_spopo->add_option("--impurity", spopo.impurity,
                          "Thermal factor >= 1");
  synth_spopo->add_option("--db", spopo.db, "Per-mode dB values")
      ->delimiter(',');

  for (CLI::App* family :
       {synth_vacuum, synth_squeezed, synth_tms, synth_mix3, synth_spopo}) {
    family->add_option("--out", synth_out, "Output file (.json or .csv)")
        ->required();
    family->add_option("--delta", synth_delta,
                       "Uniform measurement uncertainty to attach");
  }

  // --- report-check ---------------------------------------------------------
  std::string check_a, check_b;
  double check_tolerance = 1e-9;
  CLI::App* check = app.add_subcommand(
      "report-check", "Compare two analysis reports within tolerance");
  check->add_option("report_a", check_a, "First report")->required();
  check->add_option("report_b", check_b, "Second report")->required();
  check->add_option("--tolerance", check_tolerance, "Relative tolerance");

  // --- validate -------------------------------------------------------------
  std::string validate_input;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a covariance file");
  validate_cmd->add_option("--input", validate_input, "Covariance file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version = 0, any parse problem = 1
  }

  try {
    if (*analyze) {
      gwit::GaConfig ga = ga_defaults;
      if (!analyze_opt.ga_config_path.empty()) {
        // n_modes for a possible "target" key inside the file.
        const gwit::CovarianceState probe =
            gwit::load_covariance(analyze_opt.input);
        ga = gwit::GaConfig::from_json(read_file(analyze_opt.ga_config_path),
                                       probe.n_modes());
      }
      if (analyze->count("--ga-population")) ga.population_size = ga_population;
      if (analyze->count("--ga-generations")) ga.generations = ga_generations;
      if (analyze->count("--ga-tournament")) ga.tournament_size = ga_tournament;
      if (analyze->count("--ga-crossover-rate"))
        ga.crossover_rate = ga_crossover;
      if (analyze->count("--ga-blend-alpha")) ga.blend_alpha = ga_blend;
      if (analyze->count("--ga-mutation-rate"))
        ga.mutation_rate = ga_mutation_rate;
      if (analyze->count("--ga-mutation-sigma"))
        ga.mutation_sigma = ga_mutation_sigma;
      if (analyze->count("--ga-elites")) ga.elite_count = ga_elites;
      if (analyze->count("--ga-restarts")) ga.restarts = ga_restarts;
      ga.check();
      return run_analyze(analyze_opt, ga);
    }
    if (*synth) {
      gwit::CovarianceState state = gwit::vacuum_state(1);
      if (*synth_vacuum) {
        state = gwit::vacuum_state(vac_n);
      } else if (*synth_squeezed) {
        state = gwit::squeezed_supermodes(sq_db);
      } else if (*synth_tms) {
        state = gwit::two_mode_squeezed(tms_n, tms_modes.at(0) - 1,
                                        tms_modes.at(1) - 1, tms_r);
      } else if (*synth_mix3) {
        const std::vector<gwit::CovarianceState> parts = {
            gwit::two_mode_squeezed(3, 0, 1, mix3_r),
            gwit::two_mode_squeezed(3, 0, 2, mix3_r),
            gwit::two_mode_squeezed(3, 1, 2, mix3_r)};
        const gwit::Partition p12(3, {{0, 1}, {2}});
        const gwit::Partition p13(3, {{0, 2}, {1}});
        const gwit::Partition p23(3, {{1, 2}, {0}});
        state = gwit::mixture_covariance({1.0 / 3, 1.0 / 3, 1.0 / 3}, parts,
                                         std::vector<gwit::Partition>{
                                             p12, p13, p23});
      } else if (*synth_spopo) {
        spopo.delta_c = synth_delta;
        state = gwit::spopo_like(spopo);
      }
      if (!*synth_spopo)  // spopo already carries delta_c
        state = state.with_uniform_uncertainty(synth_delta);
      gwit::save_covariance(state, synth_out);
      return 0;
    }
    if (*check) {
      const std::vector<gwit::ReportDifference> diffs = gwit::report_check(
          read_file(check_a), read_file(check_b), check_tolerance);
      for (const gwit::ReportDifference& d : diffs)
        std::cout << d.path << ": " << d.detail << "\n";
      if (diffs.empty()) {
        std::cout << "reports agree within tolerance\n";
        return 0;
      }
      return 1;
    }
    if (*validate_cmd) return run_validate(validate_input);
  } catch (const gwit::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const gwit::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
