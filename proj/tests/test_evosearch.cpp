#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "archsage/evosearch.hpp"
#include "test_util.hpp"

using namespace archsage;
using namespace archsage::evo;

namespace {

// Oracle-as-fitness (sanity mode) plus a validity/count spy.
FitnessFn oracle_fitness(const space::SpaceParams& params, const data::OracleParams& oracle,
                         int* evaluations = nullptr) {
  return [params, oracle, evaluations](const std::vector<space::CellSpec>& specs) {
    std::vector<double> out;
    out.reserve(specs.size());
    for (const auto& s : specs) {
      REQUIRE(space::validate(s, params).ok());
      out.push_back(data::synth_performance(s, oracle, params));
    }
    if (evaluations) *evaluations += static_cast<int>(specs.size());
    return out;
  };
}

EAConfig small_ea(uint64_t seed) {
  EAConfig cfg;
  cfg.population_size = 30;
  cfg.generations = 10;
  cfg.tournament_size = 4;
  cfg.top_k = 5;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("evolve: generations=0 ranks the initial population") {
  space::SpaceParams params;
  data::OracleParams oracle;
  EAConfig cfg = small_ea(1);
  cfg.generations = 0;
  SearchResult r = evolve(oracle_fitness(params, oracle), params, cfg);
  REQUIRE(r.trajectory.size() == 1);
  REQUIRE(static_cast<int>(r.top_k.size()) == cfg.top_k);
  for (size_t i = 1; i < r.top_k.size(); ++i) {
    CHECK(r.top_k[i - 1].predicted >= r.top_k[i].predicted);
  }
  CHECK(r.top_k.front().predicted == doctest::Approx(r.trajectory[0].best_predicted));
}

TEST_CASE("evolve: deterministic, monotone elite fitness, valid populations") {
  space::SpaceParams params;
  data::OracleParams oracle;
  EAConfig cfg = small_ea(42);

  SearchResult a = evolve(oracle_fitness(params, oracle), params, cfg);
  SearchResult b = evolve(oracle_fitness(params, oracle), params, cfg);
  REQUIRE(a.top_k.size() == b.top_k.size());
  for (size_t i = 0; i < a.top_k.size(); ++i) {
    CHECK(a.top_k[i].spec == b.top_k[i].spec);
    CHECK(a.top_k[i].predicted == b.top_k[i].predicted);
  }
  REQUIRE(a.trajectory.size() == static_cast<size_t>(cfg.generations) + 1);
  for (size_t g = 1; g < a.trajectory.size(); ++g) {
    CHECK(a.trajectory[g].best_predicted >= a.trajectory[g - 1].best_predicted);
  }

  // Top-k specs are distinct.
  for (size_t i = 0; i < a.top_k.size(); ++i) {
    for (size_t j = i + 1; j < a.top_k.size(); ++j) {
      CHECK_FALSE(a.top_k[i].spec == a.top_k[j].spec);
    }
  }
}

TEST_CASE("evaluate_topk: singleton and max semantics") {
  space::SpaceParams params;
  data::OracleParams oracle;
  EAConfig cfg = small_ea(7);
  cfg.top_k = 1;
  SearchResult r = evaluate_topk(evolve(oracle_fitness(params, oracle), params, cfg), oracle, params);
  REQUIRE(r.top_k.size() == 1);
  CHECK(*r.best_true_accuracy == *r.top_k[0].true_accuracy);
  CHECK(*r.best_true_accuracy == data::synth_performance(r.top_k[0].spec, oracle, params));

  cfg.top_k = 5;
  SearchResult r5 = evaluate_topk(evolve(oracle_fitness(params, oracle), params, cfg), oracle, params);
  for (const ScoredSpec& s : r5.top_k) {
    REQUIRE(s.true_accuracy.has_value());
    CHECK(*r5.best_true_accuracy >= *s.true_accuracy);
  }
}

TEST_CASE("evolve with the oracle as fitness finds the enumerable-space maximum") {
  // max_nodes=3 gives a 10-cell space: enumerate it for the true maximum.
  space::SpaceParams params;
  params.max_nodes = 3;
  params.max_edges = 3;
  data::OracleParams oracle;
  oracle.noise_std = 0.0;

  double pool_max = 0.0;
  int enumerated = 0;
  {
    // V=2: single mandatory edge.
    space::CellSpec two = space::CellSpec::empty(2);
    two.ops = {space::kInput, space::kOutput};
    two.set_edge(0, 1, true);
    REQUIRE(space::validate(two, params).ok());
    pool_max = std::max(pool_max, data::synth_performance(two, oracle, params));
    ++enumerated;
    // V=3: every edge subset and interior op.
    for (int mask = 0; mask < 8; ++mask) {
      for (int op : {space::kConv1x1, space::kConv3x3, space::kMaxPool3x3}) {
        space::CellSpec s = space::CellSpec::empty(3);
        s.ops = {space::kInput, op, space::kOutput};
        s.set_edge(0, 1, mask & 1);
        s.set_edge(0, 2, mask & 2);
        s.set_edge(1, 2, mask & 4);
        if (space::validate(s, params).ok()) {
          pool_max = std::max(pool_max, data::synth_performance(s, oracle, params));
          ++enumerated;
        }
      }
    }
  }
  REQUIRE(enumerated == 10);

  EAConfig cfg;
  cfg.population_size = 20;
  cfg.generations = 10;
  cfg.top_k = 3;
  cfg.seed = 5;
  SearchResult r = evaluate_topk(evolve(oracle_fitness(params, oracle), params, cfg), oracle, params);
  CHECK(*r.best_true_accuracy == doctest::Approx(pool_max).epsilon(1e-12));
}

TEST_CASE("random_search_baseline: budget 1, determinism, subset bound") {
  space::SpaceParams params;
  data::OracleParams oracle;

  const double single = random_search_baseline(params, oracle, 1, 9);
  RngStream rng(derive_seed(9, 0xEA02));
  const space::CellSpec expected = space::sample_random(rng, params);
  CHECK(single == data::synth_performance(expected, oracle, params));

  CHECK(random_search_baseline(params, oracle, 50, 4) ==
        random_search_baseline(params, oracle, 50, 4));
  CHECK(testutil::thrown_code([&] { random_search_baseline(params, oracle, 0, 1); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("oracle-driven evolution beats blind random selection on average") {
  space::SpaceParams params;
  data::OracleParams oracle;
  double evo_sum = 0.0, random_sum = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    EAConfig cfg = small_ea(seed);
    SearchResult r = evaluate_topk(evolve(oracle_fitness(params, oracle), params, cfg), oracle, params);
    evo_sum += *r.best_true_accuracy;
    random_sum += random_search_baseline(params, oracle, cfg.population_size * (cfg.generations + 1),
                                         seed, cfg.top_k);
  }
  CHECK(evo_sum / 5.0 >= random_sum / 5.0);
}
