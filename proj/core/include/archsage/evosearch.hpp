#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "archsage/dataset.hpp"
#include "archsage/trainer.hpp"

namespace archsage::evo {

struct EAConfig {
  int population_size = 100;
  int generations = 50;
  int tournament_size = 5;
  double mutation_rate = 0.1;
  double crossover_rate = 0.5;
  int elitism = 2;
  int top_k = 10;
  uint64_t seed = 0;
};

void validate_config(const EAConfig& cfg);

struct ScoredSpec {
  space::CellSpec spec;
  double predicted = 0.0;
  std::optional<double> true_accuracy;
};

struct GenStats {
  double best_predicted = 0.0;
  double mean_predicted = 0.0;
};

struct SearchResult {
  std::vector<ScoredSpec> top_k;  // distinct, sorted by predicted fitness desc
  std::optional<double> best_true_accuracy;
  std::vector<GenStats> trajectory;  // entry 0 is the initial population
};

// Batch fitness: one predicted value per candidate spec.
using FitnessFn = std::function<std::vector<double>(const std::vector<space::CellSpec>&)>;

// Tournament selection + elitism; fitness is evaluated once per individual at
// creation and cached, so elite fitness is monotonically non-decreasing.
SearchResult evolve(const FitnessFn& fitness, const space::SpaceParams& params,
                    const EAConfig& cfg);

// Convenience wrapper using a trained assessor as the fitness function.
SearchResult evolve(const train::TrainedAssessor& model, const space::SpaceParams& params,
                    const EAConfig& cfg);

// Queries the oracle for every selected spec, records the max.
SearchResult evaluate_topk(SearchResult result, const data::OracleParams& oracle,
                           const space::SpaceParams& params);

// Predictor-free reference: sample `budget` random specs, pick a random
// subset of size top_k (selection without any ranking signal), return the
// best oracle accuracy in that subset.
double random_search_baseline(const space::SpaceParams& params, const data::OracleParams& oracle,
                              int budget, uint64_t seed, int top_k = 10);

}  // namespace archsage::evo
