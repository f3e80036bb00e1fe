#include "forge/search.hpp"

#include "forge/errors.hpp"
#include "forge/features.hpp"

namespace forge {

FitnessFn forest_fitness(const Forest& forest, const FeatureSchema& schema) {
  return [&forest, schema](const Game& game) {
    return predict_proba(forest, vectorize(game, schema));
  };
}

ClimbResult hill_climb(const Game& start, const FitnessFn& fitness, const SearchConfig& config,
                       const GenConfig& gen_config, Rng& rng) {
  ClimbResult result;
  result.game = start;
  double current = fitness(start);
  result.trace.push_back(current);

  for (int step = 0; step < config.max_steps; ++step) {
    if (current >= config.threshold) {
      result.success = true;
      return result;
    }
    Game best_game = result.game;
    double best = current;
    bool accepted = false;
    for (int i = 0; i < config.neighbors_per_step; ++i) {
      Game candidate = neighbor(result.game, gen_config, rng);
      double fit = fitness(candidate);
      if (fit >= best) {  // >= so equal-fitness candidates keep the walk moving
        best = fit;
        best_game = std::move(candidate);
        accepted = true;
      }
    }
    if (accepted) {
      result.game = std::move(best_game);
      current = best;
      result.trace.push_back(current);
    }
  }
  result.success = current >= config.threshold;
  return result;
}

namespace {

Game sane_random_game(const GenConfig& gen_config, Rng& rng) {
  for (int i = 0; i < 100; ++i) {
    Game g = random_game(gen_config, rng);
    if (sanity_check(g, gen_config.sanity_moves, rng)) return g;
  }
  throw ConfigInfeasible("no random game passed the crash check in 100 attempts");
}

}  // namespace

BatchResult generate_batch(const FitnessFn& fitness, const SearchConfig& config,
                           const GenConfig& gen_config, int count, Rng& rng) {
  BatchResult result;
  int extra_starts = 0;
  while (static_cast<int>(result.games.size()) < count) {
    Game start = sane_random_game(gen_config, rng);
    result.starts_used += 1;
    ClimbResult climb = hill_climb(start, fitness, config, gen_config, rng);

    bool duplicate = false;
    if (climb.success) {
      for (const Game& g : result.games) {
        if (g.spec == climb.game.spec && g.level == climb.game.level) {
          duplicate = true;
          break;
        }
      }
    }
    if (climb.success && !duplicate) {
      result.games.push_back(std::move(climb.game));
      result.traces.push_back(std::move(climb.trace));
      continue;
    }
    if (!climb.success && !config.restarts_allowed) {
      throw BudgetExhausted("hill climb stuck and restarts are disabled");
    }
    extra_starts += 1;
    if (extra_starts > config.restart_budget) {
      throw BudgetExhausted("exceeded restart budget of " +
                            std::to_string(config.restart_budget) + " while generating a batch");
    }
  }
  return result;
}

namespace {

Forest train_on(const std::vector<std::vector<double>>& human_rows,
                const std::vector<Game>& generated, const FeatureSchema& schema,
                ForestParams params, uint64_t seed) {
  Dataset data(schema);
  for (const auto& row : human_rows) data.add(row, Label::Human);
  for (const Game& g : generated) data.add(vectorize(g, schema), Label::Generated);
  params.seed = seed;
  return fit(data, params);
}

}  // namespace

IterationArchive adversarial_loop(const Corpus& corpus, const GenConfig& gen_config,
                                  const ForestParams& forest_params,
                                  const SearchConfig& search_config, int n_iterations,
                                  const FeatureSchema& schema, uint64_t seed) {
  GenConfig gen = gen_config;
  gen.level_capacity = schema.max_cells;  // mutations must stay vectorizable

  // the human side never changes across retrains
  std::vector<std::vector<double>> human_rows;
  for (const auto& entry : corpus.entries) human_rows.push_back(vectorize(entry.game, schema));

  IterationArchive archive;
  Rng rng(derive_seed(seed, "adversarial-loop"));

  for (int i = 0; i < kCorpusSize; ++i) archive.random_games.push_back(sane_random_game(gen, rng));
  archive.initial_forest = train_on(human_rows, archive.random_games, schema, forest_params,
                                    derive_seed(seed, "forest", 0));

  const Forest* current = &archive.initial_forest;
  for (int i = 1; i <= n_iterations; ++i) {
    BatchResult batch;
    try {
      batch = generate_batch(forest_fitness(*current, schema), search_config, gen, kCorpusSize,
                             rng);
    } catch (const BudgetExhausted&) {
      return archive;  // partial archive, complete stays false
    }
    IterationRecord record;
    record.batch = std::move(batch.games);
    record.traces = std::move(batch.traces);
    record.forest_after =
        train_on(human_rows, record.batch, schema, forest_params, derive_seed(seed, "forest", i));
    archive.iterations.push_back(std::move(record));
    current = &archive.iterations.back().forest_after;
  }
  archive.complete = true;
  return archive;
}

}  // namespace forge
