#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "forge/agents.hpp"
#include "forge/corpus.hpp"
#include "forge/experiment.hpp"
#include "forge/features.hpp"
#include "forge/search.hpp"
#include "forge/util.hpp"

namespace fs = std::filesystem;
using namespace forge;

namespace {

Game load_game_base(const std::string& base) {
  std::string name = fs::path(base).stem().string();
  return parse_game(read_file(base + ".desc"), read_file(base + ".lvl"), name);
}

FeatureSchema schema_from_flag(const std::string& flag) {
  return schema_default(flag != "noterm");
}

void write_games(const std::string& dir, const std::vector<Game>& games) {
  fs::create_directories(dir);
  for (size_t j = 0; j < games.size(); ++j) {
    auto [desc, lvl] = serialize_game(games[j]);
    std::string base = (fs::path(dir) / ("game" + std::to_string(j))).string();
    write_file(base + ".desc", desc);
    write_file(base + ".lvl", lvl);
  }
}

int cmd_gen(uint64_t seed, int count, const std::string& out, const std::string& config_path) {
  GenConfig config;
  if (!config_path.empty()) config = parse_gen_config(read_file(config_path));
  Rng rng(derive_seed(seed, "gen"));
  std::vector<Game> games;
  for (int i = 0; i < count; ++i) {
    for (int tries = 0;; ++tries) {
      Game g = random_game(config, rng);
      if (sanity_check(g, config.sanity_moves, rng)) {
        games.push_back(std::move(g));
        break;
      }
      if (tries >= 100) throw ConfigInfeasible("no random game passed the crash check");
    }
  }
  write_games(out, games);
  std::printf("wrote %d games to %s\n", count, out.c_str());
  return 0;
}

int cmd_train(const std::string& human_dir, const std::string& generated_dir,
              const std::string& out, const std::string& schema_flag, int trees,
              uint64_t seed) {
  FeatureSchema schema = schema_from_flag(schema_flag);
  Dataset data(schema);
  for (const Game& g : load_games(human_dir)) data.add(vectorize(g, schema), Label::Human);
  for (const Game& g : load_games(generated_dir)) {
    data.add(vectorize(g, schema), Label::Generated);
  }
  ForestParams params;
  params.n_trees = trees;
  params.seed = seed;
  Forest forest = fit(data, params);
  save_forest(forest, out);
  std::printf("trained %d trees on %zu rows, saved to %s\n", trees, data.size(), out.c_str());
  return 0;
}

int cmd_search(const std::string& model_path, const std::string& out, int count, uint64_t seed,
               double threshold, const std::string& schema_flag) {
  Forest forest = load_forest(model_path);
  FeatureSchema schema = schema_from_flag(schema_flag);
  require_schema(forest, schema);
  SearchConfig config;
  config.threshold = threshold;
  GenConfig gen;
  gen.level_capacity = schema.max_cells;
  Rng rng(derive_seed(seed, "search"));
  BatchResult batch = generate_batch(forest_fitness(forest, schema), config, gen, count, rng);
  write_games(out, batch.games);
  for (size_t j = 0; j < batch.traces.size(); ++j) {
    std::printf("game%zu: fitness %s after %zu accepted steps\n", j,
                format_number(batch.traces[j].back()).c_str(), batch.traces[j].size() - 1);
  }
  std::printf("wrote %d games to %s (%d starts)\n", count, out.c_str(), batch.starts_used);
  return 0;
}

int cmd_vectorize(const std::string& desc, const std::string& lvl,
                  const std::string& schema_flag, bool show_index_map) {
  FeatureSchema schema = schema_from_flag(schema_flag);
  if (show_index_map) {
    auto names = index_map(schema);
    for (size_t i = 0; i < names.size(); ++i) std::printf("%zu,%s\n", i, names[i].c_str());
    return 0;
  }
  Game game = parse_game(read_file(desc), read_file(lvl), fs::path(desc).stem().string());
  auto v = vectorize(game, schema);
  std::string line;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) line += ",";
    line += format_number(v[i]);
  }
  std::printf("%s\n", line.c_str());
  return 0;
}

int cmd_play(const std::string& game_base, const std::string& agent, uint64_t seed,
             int move_cap, int mcts_iterations, double wallclock_secs) {
  Game game = load_game_base(game_base);
  AgentFn fn;
  if (agent == "random") {
    fn = make_random_agent(derive_seed(seed, "agent"));
  } else {
    MctsParams params;
    params.iterations_per_move = mcts_iterations;
    fn = make_mcts_agent(params, derive_seed(seed, "agent"));
  }
  PlayoutResult r;
  if (wallclock_secs > 0.0) {
    // Compatibility mode: a wall-clock budget for the whole playout. Results
    // become hardware-dependent, so this is off unless requested explicitly.
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(wallclock_secs));
    GameState state = init_state(game, derive_seed(seed, "env"));
    while (state.outcome == Outcome::Ongoing && state.tick < move_cap &&
           std::chrono::steady_clock::now() < deadline) {
      step(state, fn(state));
    }
    r.outcome = state.outcome == Outcome::Win    ? PlayOutcome::Win
                : state.outcome == Outcome::Loss ? PlayOutcome::Loss
                                                 : PlayOutcome::CapExit;
    r.score = state.score;
    r.moves = state.tick;
  } else {
    r = playout(game, fn, derive_seed(seed, "env"), move_cap);
  }
  std::printf("game=%s agent=%s outcome=%s score=%lld moves=%d\n", game.name.c_str(),
              agent.c_str(), to_string(r.outcome), r.score, r.moves);
  return 0;
}

int cmd_evaluate(const std::string& dir, uint64_t seed, int move_cap, int replicates,
                 const std::string& format) {
  std::vector<Game> games = load_games(dir);
  if (games.empty()) throw WrongCount("no games in " + dir);
  MctsParams params;
  IterationReport report = evaluate_batch(games, params, seed, move_cap, replicates);
  std::vector<ExperimentRow> rows{{fs::path(dir).filename().string(), report}};
  std::printf("%s", format == "md" ? render_metrics_md(rows).c_str()
                                   : render_metrics_csv(rows).c_str());
  return 0;
}

int cmd_report(const std::string& dir, const std::string& format) {
  auto rows = load_metrics_csv(read_file((fs::path(dir) / "metrics.csv").string()));
  std::printf("%s", format == "md" ? render_metrics_md(rows).c_str()
                                   : render_metrics_csv(rows).c_str());
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& variant, int iterations,
                   uint64_t seed, const std::string& out, double threshold, int trees,
                   int move_cap, bool have_seed) {
  ExperimentConfig config;
  if (!config_path.empty()) config = parse_experiment_config(read_file(config_path));
  if (variant == "term") config.variant = Variant::Term;
  if (variant == "noterm") config.variant = Variant::NoTerm;
  if (variant == "both") config.variant = Variant::Both;
  if (iterations >= 0) config.n_iterations = iterations;
  if (have_seed) config.seed = seed;
  if (!out.empty()) config.out_dir = out;
  if (threshold > 0) config.search.threshold = threshold;
  if (trees > 0) config.forest.n_trees = trees;
  if (move_cap > 0) config.move_cap = move_cap;

  ExperimentReport report = run_experiment(config);
  std::printf("%s", render_metrics_md(report.rows).c_str());
  if (!report.complete) {
    std::fprintf(stderr, "experiment incomplete: search budget exhausted\n");
    return 1;
  }
  std::printf("report written to %s\n", config.out_dir.c_str());
  return 0;
}

// Searches for a winning action sequence, replayable from the witness
// seed: random playouts first, then MCTS attempts with growing budgets.
int cmd_witness(const std::string& game_base, const std::string& out, int attempts) {
  Game game = load_game_base(game_base);
  auto record = [&](const AgentFn& agent) {
    GameState state = init_state(game, kWitnessSeed);
    std::vector<Action> actions;
    while (state.outcome == Outcome::Ongoing && actions.size() < 700) {
      Action a = agent(state);
      step(state, a);
      actions.push_back(a);
    }
    return std::pair(state.outcome, actions);
  };
  for (int i = 0; i < attempts; ++i) {
    auto [outcome, actions] = record(make_random_agent(derive_seed(1000, "witness", i)));
    if (outcome == Outcome::Win) {
      std::string text;
      for (Action a : actions) text += std::string(to_string(a)) + "\n";
      write_file(out, text);
      std::printf("random witness (%zu moves) -> %s\n", actions.size(), out.c_str());
      return 0;
    }
  }
  for (int budget : {100, 300, 1000}) {
    for (int i = 0; i < 10; ++i) {
      MctsParams params;
      params.iterations_per_move = budget;
      auto [outcome, actions] = record(make_mcts_agent(params, derive_seed(2000 + budget, "witness", i)));
      if (outcome == Outcome::Win) {
        std::string text;
        for (Action a : actions) text += std::string(to_string(a)) + "\n";
        write_file(out, text);
        std::printf("mcts witness (%zu moves, %d iters) -> %s\n", actions.size(), budget,
                    out.c_str());
        return 0;
      }
    }
  }
  std::fprintf(stderr, "no winning sequence found for %s\n", game_base.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"game generation and evaluation pipeline"};
  app.require_subcommand(1);

  std::string out, config_path, model_path, dir, human_dir, generated_dir;
  std::string desc_path, lvl_path, game_base, agent = "mcts", schema_flag = "term";
  std::string variant, format = "csv";
  uint64_t seed = 0;
  int count = 8, trees = 100, move_cap = 700, replicates = 1, mcts_iterations = 100;
  int iterations = -1, attempts = 200;
  double threshold = 0, wallclock_secs = 0;
  bool show_index_map = false;

  auto* gen = app.add_subcommand("gen", "generate sanity-checked random games");
  gen->add_option("--seed", seed);
  gen->add_option("--count", count);
  gen->add_option("--out", out)->required();
  gen->add_option("--config", config_path);

  auto* train = app.add_subcommand("train", "fit the vote-fraction classifier");
  train->add_option("--human", human_dir)->required();
  train->add_option("--generated", generated_dir)->required();
  train->add_option("--out", out)->required();
  train->add_option("--schema", schema_flag)->check(CLI::IsMember({"term", "noterm"}));
  train->add_option("--trees", trees);
  train->add_option("--seed", seed);

  auto* search = app.add_subcommand("search", "hill-climb games past the fitness threshold");
  search->add_option("--model", model_path)->required();
  search->add_option("--out", out)->required();
  search->add_option("--count", count);
  search->add_option("--seed", seed);
  search->add_option("--threshold", threshold)->default_val(0.95);
  search->add_option("--schema", schema_flag)->check(CLI::IsMember({"term", "noterm"}));

  auto* vectorize_cmd = app.add_subcommand("vectorize", "print a game's feature vector as CSV");
  vectorize_cmd->add_option("desc", desc_path);
  vectorize_cmd->add_option("lvl", lvl_path);
  vectorize_cmd->add_option("--schema", schema_flag)->check(CLI::IsMember({"term", "noterm"}));
  vectorize_cmd->add_flag("--index-map", show_index_map, "print the index documentation");

  auto* play = app.add_subcommand("play", "run one agent on one game");
  play->add_option("--game", game_base, "path base (without .desc/.lvl)")->required();
  play->add_option("--agent", agent)->check(CLI::IsMember({"mcts", "random"}));
  play->add_option("--seed", seed);
  play->add_option("--move-cap", move_cap);
  play->add_option("--mcts-iterations", mcts_iterations);
  play->add_option("--wallclock-secs", wallclock_secs,
                   "optional wall-clock budget for the playout (0 = off)");

  auto* evaluate = app.add_subcommand("evaluate", "play a directory of games with both agents");
  evaluate->add_option("--dir", dir)->required();
  evaluate->add_option("--seed", seed);
  evaluate->add_option("--move-cap", move_cap);
  evaluate->add_option("--replicates", replicates);
  evaluate->add_option("--format", format)->check(CLI::IsMember({"csv", "md"}));

  auto* report = app.add_subcommand("report", "re-render tables from an experiment directory");
  report->add_option("dir", dir)->required();
  report->add_option("--format", format)->check(CLI::IsMember({"csv", "md"}));

  auto* experiment = app.add_subcommand("experiment", "run the full adversarial pipeline");
  experiment->add_option("--config", config_path);
  experiment->add_option("--variant", variant)->check(CLI::IsMember({"term", "noterm", "both"}));
  experiment->add_option("--iterations", iterations);
  auto* seed_opt = experiment->add_option("--seed", seed);
  experiment->add_option("--out", out);
  experiment->add_option("--threshold", threshold);
  experiment->add_option("--trees", trees)->default_val(0);
  experiment->add_option("--move-cap", move_cap)->default_val(0);

  auto* witness = app.add_subcommand("witness", "record a winning action sequence for a game");
  witness->add_option("--game", game_base)->required();
  witness->add_option("--out", out)->required();
  witness->add_option("--attempts", attempts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(seed, count, out, config_path);
    if (train->parsed()) {
      return cmd_train(human_dir, generated_dir, out, schema_flag, trees, seed);
    }
    if (search->parsed()) {
      return cmd_search(model_path, out, count, seed, threshold, schema_flag);
    }
    if (vectorize_cmd->parsed()) {
      if (!show_index_map && (desc_path.empty() || lvl_path.empty())) {
        std::fprintf(stderr, "vectorize requires desc and lvl paths (or --index-map)\n");
        return 2;
      }
      return cmd_vectorize(desc_path, lvl_path, schema_flag, show_index_map);
    }
    if (play->parsed()) {
      return cmd_play(game_base, agent, seed, move_cap, mcts_iterations, wallclock_secs);
    }
    if (evaluate->parsed()) return cmd_evaluate(dir, seed, move_cap, replicates, format);
    if (report->parsed()) return cmd_report(dir, format);
    if (experiment->parsed()) {
      return cmd_experiment(config_path, variant, iterations, seed, out, threshold, trees,
                            move_cap, seed_opt->count() > 0);
    }
    if (witness->parsed()) return cmd_witness(game_base, out, attempts);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
