#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "forge/engine.hpp"
#include "forge/rng.hpp"

namespace forge {

struct MctsParams {
  int iterations_per_move = 100;
  int rollout_depth = 20;
  double exploration_constant = std::sqrt(2.0);

  bool operator==(const MctsParams&) const = default;
};

// One UCB1 decision, recorded when a selection log is requested: the
// chosen index maximizes value[i] + c * sqrt(ln(parent_visits) / visits[i]).
struct SelectionRecord {
  int parent_visits = 0;
  std::vector<int> child_visits;
  std::vector<double> child_values;  // mean rewards
  int chosen = -1;
};

Action random_agent(const GameState& state, Rng& rng);

// One UCT planning step: iterations_per_move iterations of select (UCB1),
// expand (uniformly random untried action), rollout (random policy, at
// most rollout_depth steps), backpropagate. Rewards are root-relative:
// tanh(score delta / 5) plus +1/-1 on win/loss. Returns the most-visited
// root action. Optional outputs: per-root-child (action, visits) pairs and
// the UCB1 selection log.
Action mcts_plan(const GameState& state, const MctsParams& params, Rng& rng,
                 std::vector<std::pair<Action, int>>* root_visits = nullptr,
                 std::vector<SelectionRecord>* selection_log = nullptr);

// An AgentFn-compatible adapter owning its RNG stream.
AgentFn make_random_agent(uint64_t seed);
AgentFn make_mcts_agent(const MctsParams& params, uint64_t seed);

struct AgentMetrics {
  double games_completed = 0;  // in-game Win/Loss only, cap exits excluded
  double avg_score = 0;
  double stddev_score = 0;
  double max_score = 0;
  double avg_moves = 0;
  double stddev_moves = 0;
};

struct IterationReport {
  AgentMetrics mcts;
  AgentMetrics random;
  int n_games = 0;
  int replicates = 1;
  int move_cap = 700;
};

// Plays every game once per replicate with each agent. games_completed is
// averaged over replicates (an integer 0..n_games when replicates == 1);
// score/move statistics aggregate all playouts of the agent (population
// standard deviation); max_score is the single best playout.
IterationReport evaluate_batch(const std::vector<Game>& games, const MctsParams& params,
                               uint64_t seed, int move_cap = 700, int replicates = 1);

}  // namespace forge
