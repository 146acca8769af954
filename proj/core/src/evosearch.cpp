#include "archsage/evosearch.hpp"

#include <algorithm>
#include <map>

namespace archsage::evo {

namespace {

struct Individual {
  space::CellSpec spec;
  double fitness = 0.0;
};

GenStats stats_of(const std::vector<Individual>& pop) {
  GenStats s;
  s.best_predicted = pop.front().fitness;
  double sum = 0.0;
  for (const Individual& ind : pop) {
    s.best_predicted = std::max(s.best_predicted, ind.fitness);
    sum += ind.fitness;
  }
  s.mean_predicted = sum / static_cast<double>(pop.size());
  return s;
}

// Tournament winner: best cached fitness among `size` uniform draws,
// first-drawn wins ties.
const Individual& tournament(const std::vector<Individual>& pop, int size, RngStream& rng) {
  const Individual* best = &pop[rng.uniform_index(pop.size())];
  for (int i = 1; i < size; ++i) {
    const Individual& cand = pop[rng.uniform_index(pop.size())];
    if (cand.fitness > best->fitness) best = &cand;
  }
  return *best;
}

std::vector<size_t> rank_desc(const std::vector<Individual>& pop) {
  std::vector<size_t> order(pop.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return pop[a].fitness > pop[b].fitness; });
  return order;
}

}  // namespace

void validate_config(const EAConfig& cfg) {
  if (cfg.top_k < 1) raise(ErrorCode::InvalidArgument, "top_k must be >= 1");
  if (cfg.population_size < cfg.top_k) {
    raise(ErrorCode::InvalidArgument, "population_size must be >= top_k");
  }
  if (cfg.generations < 0) raise(ErrorCode::InvalidArgument, "generations must be >= 0");
  if (cfg.tournament_size < 1) raise(ErrorCode::InvalidArgument, "tournament_size must be >= 1");
  if (cfg.mutation_rate < 0.0 || cfg.mutation_rate > 1.0 || cfg.crossover_rate < 0.0 ||
      cfg.crossover_rate > 1.0) {
    raise(ErrorCode::InvalidArgument, "rates must be in [0,1]");
  }
  if (cfg.elitism < 0 || cfg.elitism > cfg.population_size) {
    raise(ErrorCode::InvalidArgument, "elitism must be in [0, population_size]");
  }
}

SearchResult evolve(const FitnessFn& fitness, const space::SpaceParams& params,
                    const EAConfig& cfg) {
  validate_config(cfg);
  RngStream rng(derive_seed(cfg.seed, 0xEA01));

  auto evaluate = [&](std::vector<space::CellSpec> specs) {
    std::vector<double> f = fitness(specs);
    if (f.size() != specs.size()) {
      raise(ErrorCode::LengthMismatch, "fitness function returned wrong count");
    }
    std::vector<Individual> out;
    out.reserve(specs.size());
    for (size_t i = 0; i < specs.size(); ++i) out.push_back({std::move(specs[i]), f[i]});
    return out;
  };

  std::vector<space::CellSpec> init;
  init.reserve(static_cast<size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) init.push_back(space::sample_random(rng, params));
  std::vector<Individual> pop = evaluate(std::move(init));

  SearchResult result;
  result.trajectory.push_back(stats_of(pop));

  for (int gen = 0; gen < cfg.generations; ++gen) {
    const std::vector<size_t> order = rank_desc(pop);
    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int e = 0; e < cfg.elitism && e < static_cast<int>(order.size()); ++e) {
      next.push_back(pop[order[static_cast<size_t>(e)]]);  // cached fitness survives
    }

    std::vector<space::CellSpec> offspring;
    offspring.reserve(pop.size() - next.size());
    while (next.size() + offspring.size() < pop.size()) {
      const Individual& p1 = tournament(pop, cfg.tournament_size, rng);
      space::CellSpec child;
      if (rng.bernoulli(cfg.crossover_rate)) {
        const Individual& p2 = tournament(pop, cfg.tournament_size, rng);
        child = space::crossover(p1.spec, p2.spec, rng, params);
      } else {
        child = p1.spec;
      }
      offspring.push_back(space::mutate(child, rng, cfg.mutation_rate, params));
    }

    std::vector<Individual> scored = evaluate(std::move(offspring));
    for (Individual& ind : scored) next.push_back(std::move(ind));
    pop = std::move(next);
    result.trajectory.push_back(stats_of(pop));
  }

  // Top-k distinct specs by predicted fitness; the positional encoding is
  // injective on valid specs, so it serves as the dedup key.
  const std::vector<size_t> order = rank_desc(pop);
  std::map<std::vector<double>, bool> seen;
  for (size_t idx : order) {
    if (static_cast<int>(result.top_k.size()) >= cfg.top_k) break;
    auto key = space::encode(pop[idx].spec, params);
    if (seen.contains(key)) continue;
    seen[key] = true;
    result.top_k.push_back({pop[idx].spec, pop[idx].fitness, std::nullopt});
  }
  return result;
}

SearchResult evolve(const train::TrainedAssessor& model, const space::SpaceParams& params,
                    const EAConfig& cfg) {
  return evolve(
      [&model](const std::vector<space::CellSpec>& specs) { return train::predict(model, specs); },
      params, cfg);
}

SearchResult evaluate_topk(SearchResult result, const data::OracleParams& oracle,
                           const space::SpaceParams& params) {
  if (result.top_k.empty()) raise(ErrorCode::InvalidArgument, "evaluate_topk on empty selection");
  double best = 0.0;
  for (ScoredSpec& s : result.top_k) {
    s.true_accuracy = data::synth_performance(s.spec, oracle, params);
    best = std::max(best, *s.true_accuracy);
  }
  result.best_true_accuracy = best;
  return result;
}

double random_search_baseline(const space::SpaceParams& params, const data::OracleParams& oracle,
                              int budget, uint64_t seed, int top_k) {
  if (budget < 1) raise(ErrorCode::InvalidArgument, "budget must be >= 1");
  if (top_k < 1) raise(ErrorCode::InvalidArgument, "top_k must be >= 1");
  RngStream rng(derive_seed(seed, 0xEA02));
  std::vector<space::CellSpec> pool;
  pool.reserve(static_cast<size_t>(budget));
  for (int i = 0; i < budget; ++i) pool.push_back(space::sample_random(rng, params));

  // Random subset of size top_k: no ranking signal without a predictor.
  const int k = std::min(top_k, budget);
  std::vector<int> idx(static_cast<size_t>(budget));
  for (int i = 0; i < budget; ++i) idx[static_cast<size_t>(i)] = i;
  double best = 0.0;
  for (int i = 0; i < k; ++i) {
    const size_t j = static_cast<size_t>(i) + rng.uniform_index(idx.size() - static_cast<size_t>(i));
    std::swap(idx[static_cast<size_t>(i)], idx[j]);
    best = std::max(best, data::synth_performance(pool[static_cast<size_t>(idx[static_cast<size_t>(i)])],
                                                  oracle, params));
  }
  return best;
}

}  // namespace archsage::evo
