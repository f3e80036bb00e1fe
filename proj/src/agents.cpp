#include "forge/agents.hpp"

#include <algorithm>
#include <memory>

#include "forge/util.hpp"

namespace forge {

namespace {

constexpr double kScoreScale = 5.0;

double leaf_reward(const GameState& state, long long root_score) {
  double r = std::tanh(static_cast<double>(state.score - root_score) / kScoreScale);
  if (state.outcome == Outcome::Win) r += 1.0;
  if (state.outcome == Outcome::Loss) r -= 1.0;
  return r;
}

struct Node {
  GameState state;
  int parent = -1;
  Action action = Action::Nil;
  std::vector<int> children;
  std::vector<Action> untried;
  int visits = 0;
  double total = 0.0;
};

}  // namespace

Action random_agent(const GameState& state, Rng& rng) {
  auto actions = legal_actions(state);
  return actions[rng.index(actions.size())];
}

Action mcts_plan(const GameState& state, const MctsParams& params, Rng& rng,
                 std::vector<std::pair<Action, int>>* root_visits,
                 std::vector<SelectionRecord>* selection_log) {
  std::vector<Node> nodes;
  nodes.reserve(static_cast<size_t>(params.iterations_per_move) + 1);
  nodes.push_back(Node{state, -1, Action::Nil, {}, legal_actions(state), 0, 0.0});
  long long root_score = state.score;

  for (int it = 0; it < params.iterations_per_move; ++it) {
    // select
    int at = 0;
    while (nodes[at].untried.empty() && !nodes[at].children.empty() &&
           nodes[at].state.outcome == Outcome::Ongoing) {
      double log_parent = std::log(static_cast<double>(nodes[at].visits));
      int best = -1;
      double best_ucb = 0.0;
      for (int child : nodes[at].children) {
        double mean = nodes[child].total / nodes[child].visits;
        double ucb = mean + params.exploration_constant *
                                std::sqrt(log_parent / nodes[child].visits);
        if (best < 0 || ucb > best_ucb) {
          best = child;
          best_ucb = ucb;
        }
      }
      if (selection_log) {
        SelectionRecord rec;
        rec.parent_visits = nodes[at].visits;
        for (int child : nodes[at].children) {
          rec.child_visits.push_back(nodes[child].visits);
          rec.child_values.push_back(nodes[child].total / nodes[child].visits);
        }
        rec.chosen = static_cast<int>(
            std::find(nodes[at].children.begin(), nodes[at].children.end(), best) -
            nodes[at].children.begin());
        selection_log->push_back(std::move(rec));
      }
      at = best;
    }

    // expand: one uniformly random untried action
    if (nodes[at].state.outcome == Outcome::Ongoing && !nodes[at].untried.empty()) {
      size_t pick = rng.index(nodes[at].untried.size());
      Action action = nodes[at].untried[pick];
      nodes[at].untried.erase(nodes[at].untried.begin() + pick);
      Node child;
      child.state = nodes[at].state;
      child.parent = at;
      child.action = action;
      step(child.state, action);
      child.untried = child.state.outcome == Outcome::Ongoing ? legal_actions(child.state)
                                                              : std::vector<Action>{};
      nodes[at].children.push_back(static_cast<int>(nodes.size()));
      nodes.push_back(std::move(child));
      at = static_cast<int>(nodes.size()) - 1;
    }

    // rollout
    GameState sim = nodes[at].state;
    for (int d = 0; d < params.rollout_depth && sim.outcome == Outcome::Ongoing; ++d) {
      step(sim, random_agent(sim, rng));
    }
    double reward = leaf_reward(sim, root_score);

    // backpropagate
    for (int up = at; up >= 0; up = nodes[up].parent) {
      nodes[up].visits += 1;
      nodes[up].total += reward;
    }
  }

  int best = -1;
  for (int child : nodes[0].children) {
    if (best < 0 || nodes[child].visits > nodes[best].visits) best = child;
  }
  if (root_visits) {
    root_visits->clear();
    for (int child : nodes[0].children) {
      root_visits->emplace_back(nodes[child].action, nodes[child].visits);
    }
  }
  // no iterations or terminal root: fall back to a legal action
  if (best < 0) return random_agent(state, rng);
  return nodes[best].action;
}

AgentFn make_random_agent(uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const GameState& state) { return random_agent(state, *rng); };
}

AgentFn make_mcts_agent(const MctsParams& params, uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng, params](const GameState& state) { return mcts_plan(state, params, *rng); };
}

namespace {

struct Tally {
  std::vector<double> scores;
  std::vector<double> moves;
  double completed = 0;

  AgentMetrics metrics(int replicates) const {
    AgentMetrics m;
    m.games_completed = completed / replicates;
    if (scores.empty()) return m;
    double sum = 0, sum2 = 0;
    for (double s : scores) {
      sum += s;
      sum2 += s * s;
    }
    m.avg_score = sum / scores.size();
    m.stddev_score = std::sqrt(std::max(0.0, sum2 / scores.size() - m.avg_score * m.avg_score));
    m.max_score = *std::max_element(scores.begin(), scores.end());
    sum = sum2 = 0;
    for (double v : moves) {
      sum += v;
      sum2 += v * v;
    }
    m.avg_moves = sum / moves.size();
    m.stddev_moves = std::sqrt(std::max(0.0, sum2 / moves.size() - m.avg_moves * m.avg_moves));
    return m;
  }
};

}  // namespace

IterationReport evaluate_batch(const std::vector<Game>& games, const MctsParams& params,
                               uint64_t seed, int move_cap, int replicates) {
  IterationReport report;
  report.n_games = static_cast<int>(games.size());
  report.replicates = replicates;
  report.move_cap = move_cap;

  size_t n_plays = games.size() * static_cast<size_t>(replicates);
  std::vector<PlayoutResult> mcts_results(n_plays), random_results(n_plays);
  parallel_for(n_plays, [&](size_t i) {
    size_t g = i / replicates;
    uint64_t env_seed = derive_seed(seed, "env", i);
    mcts_results[i] = playout(games[g], make_mcts_agent(params, derive_seed(seed, "mcts", i)),
                              env_seed, move_cap);
    random_results[i] =
        playout(games[g], make_random_agent(derive_seed(seed, "random", i)), env_seed, move_cap);
  });

  Tally mcts_tally, random_tally;
  for (size_t i = 0; i < n_plays; ++i) {
    mcts_tally.scores.push_back(static_cast<double>(mcts_results[i].score));
    mcts_tally.moves.push_back(static_cast<double>(mcts_results[i].moves));
    if (mcts_results[i].outcome != PlayOutcome::CapExit) mcts_tally.completed += 1;
    random_tally.scores.push_back(static_cast<double>(random_results[i].score));
    random_tally.moves.push_back(static_cast<double>(random_results[i].moves));
    if (random_results[i].outcome != PlayOutcome::CapExit) random_tally.completed += 1;
  }
  report.mcts = mcts_tally.metrics(replicates);
  report.random = random_tally.metrics(replicates);
  return report;
}

}  // namespace forge
