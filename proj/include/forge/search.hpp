#pragma once

#include <functional>
#include <vector>

#include "forge/corpus.hpp"
#include "forge/forest.hpp"
#include "forge/generator.hpp"

namespace forge {

struct SearchConfig {
  double threshold = 0.95;
  int neighbors_per_step = 20;
  int max_steps = 500;
  bool restarts_allowed = true;
  int restart_budget = 200;  // total extra starts across one batch

  bool operator==(const SearchConfig&) const = default;
};

// Fitness abstraction so searches can run under a mock as well as a
// trained forest.
using FitnessFn = std::function<double(const Game&)>;

FitnessFn forest_fitness(const Forest& forest, const FeatureSchema& schema);

struct ClimbResult {
  bool success = false;  // false: stuck after max_steps below threshold
  Game game;
  std::vector<double> trace;  // fitness at start, then per accepted step
};

// Greedy ascent: each step scores neighbors_per_step mutations (rule or
// level, coin-flipped) and keeps the best of candidates and incumbent,
// preferring a candidate on ties so plateaus still drift. The trace is
// non-decreasing. Succeeds as soon as fitness >= threshold.
ClimbResult hill_climb(const Game& start, const FitnessFn& fitness, const SearchConfig& config,
                       const GenConfig& gen_config, Rng& rng);

struct BatchResult {
  std::vector<Game> games;
  std::vector<std::vector<double>> traces;
  int starts_used = 0;
};

// Runs hill climbs from fresh sanity-checked random starts until `count`
// games reach the threshold. Duplicates of earlier batch members are
// rejected and climbed again. Throws BudgetExhausted once failed or
// duplicate climbs exceed config.restart_budget (immediately if a climb
// gets stuck while restarts_allowed is false).
BatchResult generate_batch(const FitnessFn& fitness, const SearchConfig& config,
                           const GenConfig& gen_config, int count, Rng& rng);

struct IterationRecord {
  std::vector<Game> batch;
  std::vector<std::vector<double>> traces;
  Forest forest_after;  // retrained on corpus (Human) + this batch (Generated)
};

struct IterationArchive {
  std::vector<Game> random_games;  // iteration 0's Generated side
  Forest initial_forest;           // corpus (Human) vs random_games (Generated)
  std::vector<IterationRecord> iterations;
  bool complete = false;  // false when the budget ran out mid-loop
};

// The adversarial loop: train, generate until fooled, retrain. Human rows
// are vectorized once and reused byte-identically at every retrain.
IterationArchive adversarial_loop(const Corpus& corpus, const GenConfig& gen_config,
                                  const ForestParams& forest_params,
                                  const SearchConfig& search_config, int n_iterations,
                                  const FeatureSchema& schema, uint64_t seed);

}  // namespace forge
