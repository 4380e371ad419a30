#include "gwit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "gwit/errors.hpp"
#include "gwit/rng.hpp"

namespace gwit {
namespace {

constexpr int kStaleGenerationsPerHalving = 50;
constexpr double kInitGeneSigma = 0.5;

struct Individual {
  Genome genome;
  double fitness = 0.0;
};

int tournament_pick(const std::vector<Individual>& pop, int size, Rng& rng) {
  int best = rng.uniform_int(0, static_cast<int>(pop.size()) - 1);
  for (int i = 1; i < size; ++i) {
    const int contender = rng.uniform_int(0, static_cast<int>(pop.size()) - 1);
    const auto key = [&](int idx) {
      return std::make_pair(pop[static_cast<size_t>(idx)].fitness, idx);
    };
    if (key(contender) < key(best)) best = contender;
  }
  return best;
}

}  // namespace

Genome::Genome(int n_modes, std::vector<double> genes)
    : n_modes_(n_modes), genes_(std::move(genes)) {
  if (n_modes_ < 1) throw InputError("genome: n_modes must be >= 1");
  if (static_cast<int>(genes_.size()) != gene_count(n_modes_))
    throw InputError("genome: expected " +
                     std::to_string(gene_count(n_modes_)) + " genes, got " +
                     std::to_string(genes_.size()));
  for (double& g : genes_) g = std::clamp(g, -kGeneBound, kGeneBound);
}

Genome Genome::identity(int n_modes) {
  std::vector<double> genes(static_cast<size_t>(gene_count(n_modes)), 0.0);
  // Packed lower triangle, row-major; (r, r) sits at r(r+1)/2 + r.
  for (int r = 0; r < 2 * n_modes; ++r)
    genes[static_cast<size_t>(r * (r + 1) / 2 + r)] = 1.0;
  return Genome(n_modes, std::move(genes));
}

TestOperator Genome::decode() const {
  const int dim = 2 * n_modes_;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  int idx = 0;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c <= r; ++c)
      g(r, c) = genes_[static_cast<size_t>(idx++)];
  return TestOperator::from_positive_factor(g, kEps);
}

void GaConfig::check() const {
  if (population_size < 2) throw InputError("ga: population_size must be >= 2");
  if (generations < 1) throw InputError("ga: generations must be >= 1");
  if (tournament_size < 1 || tournament_size > population_size)
    throw InputError("ga: tournament_size must be in 1..population_size");
  if (crossover_rate < 0.0 || crossover_rate > 1.0)
    throw InputError("ga: crossover_rate must be in [0, 1]");
  if (blend_alpha < 0.0) throw InputError("ga: blend_alpha must be >= 0");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw InputError("ga: mutation_rate must be in [0, 1]");
  if (mutation_sigma <= 0.0) throw InputError("ga: mutation_sigma must be > 0");
  if (elite_count < 0 || elite_count >= population_size)
    throw InputError("ga: elite_count must be in 0..population_size-1");
  if (restarts < 1) throw InputError("ga: restarts must be >= 1");
}

GaConfig GaConfig::from_json(const std::string& text, int n_modes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("ga config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("ga config JSON: expected an object");
  GaConfig config;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "population_size") config.population_size = value.get<int>();
      else if (key == "generations") config.generations = value.get<int>();
      else if (key == "tournament_size")
        config.tournament_size = value.get<int>();
      else if (key == "crossover_rate")
        config.crossover_rate = value.get<double>();
      else if (key == "blend_alpha") config.blend_alpha = value.get<double>();
      else if (key == "mutation_rate")
        config.mutation_rate = value.get<double>();
      else if (key == "mutation_sigma")
        config.mutation_sigma = value.get<double>();
      else if (key == "elite_count") config.elite_count = value.get<int>();
      else if (key == "restarts") config.restarts = value.get<int>();
      else if (key == "rng_seed") config.rng_seed = value.get<std::uint64_t>();
      else if (key == "target")
        config.target =
            SeparabilityTarget::parse(value.get<std::string>(), n_modes);
      else
        throw InputError("ga config JSON: unknown key \"" + key + "\"");
    } catch (const nlohmann::json::exception&) {
      throw InputError("ga config JSON: bad value for \"" + key + "\"");
    }
  }
  config.check();
  return config;
}

double objective(const Genome& genome, const CovarianceState& state,
                 const SeparabilityTarget& target) {
  SubsetScoreCache cache(genome.decode());
  return verdict(cache, state, target).sigma;
}

GaResult minimize(const CovarianceState& state, const GaConfig& config) {
  config.check();
  const int n = state.n_modes();
  if (config.target.is_individual() &&
      config.target.partition().n_modes() != n)
    throw InputError("ga: target partition does not match the state");
  if (config.target.is_convex_k() && config.target.k() > n)
    throw InputError("ga: target K exceeds the state's mode count");
  // Decoded operators have strictly positive diagonals, so one positive
  // diagonal uncertainty is enough to keep Delta<L> > 0 over the whole
  // search space and every sigma finite.
  if (state.uncertainty().diagonal().maxCoeff() <= 0.0)
    throw InputError(
        "ga: the state needs a positive diagonal uncertainty entry; "
        "significance against zero error is not finite");

  const int gene_count = Genome::gene_count(n);
  std::int64_t evaluations = 0;
  auto evaluate = [&](const Genome& genome) {
    ++evaluations;
    SubsetScoreCache cache(genome.decode());
    return verdict(cache, state, config.target).sigma;
  };

  Genome best_genome = Genome::identity(n);
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  history.reserve(static_cast<size_t>(config.restarts) *
                  static_cast<size_t>(config.generations));

  for (int restart = 0; restart < config.restarts; ++restart) {
    Rng rng(mix_seed(config.rng_seed, static_cast<std::uint64_t>(restart)));
    std::vector<Individual> population;
    population.reserve(static_cast<size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
      Genome genome = (restart == 0 && i == 0)
                          ? Genome::identity(n)
                          : [&] {
                              std::vector<double> genes(
                                  static_cast<size_t>(gene_count));
                              for (double& g : genes)
                                g = rng.normal(0.0, kInitGeneSigma);
                              return Genome(n, std::move(genes));
                            }();
      const double fitness = evaluate(genome);
      population.push_back({std::move(genome), fitness});
    }

    double restart_best = std::numeric_limits<double>::infinity();
    for (const Individual& ind : population)
      restart_best = std::min(restart_best, ind.fitness);
    for (const Individual& ind : population)
      if (ind.fitness < best_fitness) {
        best_fitness = ind.fitness;
        best_genome = ind.genome;
      }

    double sigma = config.mutation_sigma;
    int stale = 0;
    for (int gen = 0; gen < config.generations; ++gen) {
      // Elites survive unchanged (and keep their cached fitness).
      std::vector<int> order(population.size());
      for (size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::make_pair(population[static_cast<size_t>(a)].fitness, a) <
               std::make_pair(population[static_cast<size_t>(b)].fitness, b);
      });
      std::vector<Individual> next;
      next.reserve(population.size());
      for (int e = 0; e < config.elite_count; ++e)
        next.push_back(population[static_cast<size_t>(order[static_cast<size_t>(e)])]);

      while (static_cast<int>(next.size()) < config.population_size) {
        const Individual& p1 =
            population[static_cast<size_t>(tournament_pick(
                population, config.tournament_size, rng))];
        const Individual& p2 =
            population[static_cast<size_t>(tournament_pick(
                population, config.tournament_size, rng))];
        std::vector<double> child_a = p1.genome.genes();
        std::vector<double> child_b = p2.genome.genes();
        if (rng.uniform() < config.crossover_rate) {
          // BLX-alpha: each child gene lands in the parents' interval
          // stretched by alpha on both sides.
          for (int g = 0; g < gene_count; ++g) {
            const double x = p1.genome.genes()[static_cast<size_t>(g)];
            const double y = p2.genome.genes()[static_cast<size_t>(g)];
            const double ua =
                rng.uniform(-config.blend_alpha, 1.0 + config.blend_alpha);
            const double ub =
                rng.uniform(-config.blend_alpha, 1.0 + config.blend_alpha);
            child_a[static_cast<size_t>(g)] = x + ua * (y - x);
            child_b[static_cast<size_t>(g)] = y + ub * (x - y);
          }
        }
        for (std::vector<double>* child : {&child_a, &child_b}) {
          for (double& g : *child)
            if (rng.uniform() < config.mutation_rate)
              g += rng.normal(0.0, sigma);
        }
        for (std::vector<double>* child : {&child_a, &child_b}) {
          if (static_cast<int>(next.size()) >= config.population_size) break;
          Genome genome(n, std::move(*child));
          const double fitness = evaluate(genome);
          next.push_back({std::move(genome), fitness});
        }
      }
      population = std::move(next);

      double gen_best = std::numeric_limits<double>::infinity();
      const Individual* gen_best_ind = nullptr;
      for (const Individual& ind : population)
        if (ind.fitness < gen_best) {
          gen_best = ind.fitness;
          gen_best_ind = &ind;
        }
      if (gen_best < restart_best) {
        restart_best = gen_best;
        stale = 0;
      } else if (++stale >= kStaleGenerationsPerHalving) {
        sigma *= 0.5;
        stale = 0;
      }
      if (gen_best_ind && gen_best < best_fitness) {
        best_fitness = gen_best;
        best_genome = gen_best_ind->genome;
      }
      history.push_back(best_fitness);  // global best-so-far: non-increasing
    }
  }

  GaResult result{best_genome, best_genome.decode(), WitnessVerdict{}, {}, 0};
  SubsetScoreCache cache(result.best_operator);
  result.best_verdict = verdict(cache, state, config.target);
  result.history = std::move(history);
  result.evaluations = evaluations;
  return result;
}

}  // namespace gwit
