#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/experiment.hpp"
#include "forge/util.hpp"
#include "helpers.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

// A configuration small enough to run inside a unit test but exercising
// the full pipeline: one iteration, modest forest, short playouts.
ExperimentConfig small_config(const std::string& out_dir) {
  ExperimentConfig config;
  config.variant = Variant::Term;
  config.n_iterations = 1;
  config.seed = 3;
  config.out_dir = out_dir;
  config.corpus_dir = testutil::corpus_dir();
  config.move_cap = 120;
  config.forest.n_trees = 12;
  config.search.threshold = 0.7;
  config.search.neighbors_per_step = 8;
  config.search.max_steps = 60;
  config.search.restart_budget = 150;
  config.mcts.iterations_per_move = 40;
  return config;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(FORGE_BINARY) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::vector<std::string> lines_of(const std::string& text) { return split_lines(text); }

// Field values are dyadic fractions, so the table's 10-significant-digit
// decimal formatting represents them exactly and reload is lossless.
ExperimentRow fake_row(const std::string& label, double seed_value) {
  ExperimentRow row;
  row.label = label;
  row.report.n_games = 8;
  row.report.move_cap = 700;
  row.report.replicates = 1;
  row.report.mcts.games_completed = 7;
  row.report.mcts.avg_score = seed_value;
  row.report.mcts.stddev_score = seed_value / 4.0;
  row.report.mcts.max_score = seed_value * 2 + 1;
  row.report.mcts.avg_moves = 123.25;
  row.report.mcts.stddev_moves = 4.5;
  row.report.random.games_completed = 5;
  row.report.random.avg_score = -seed_value;
  row.report.random.stddev_score = 0.125;
  row.report.random.max_score = 2;
  row.report.random.avg_moves = 700;
  row.report.random.stddev_moves = 0;
  return row;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("experiment configs round-trip exactly") {
  ExperimentConfig config;
  config.variant = Variant::Term;
  config.n_iterations = 3;
  config.seed = 9;
  config.out_dir = "runs/custom";
  config.corpus_dir = "elsewhere";
  config.move_cap = 120;
  config.replicates = 2;
  config.gen.level_width = 7;
  config.gen.level_height = 5;
  config.gen.modifier_probability = 0.125;
  config.forest.n_trees = 31;
  config.forest.max_depth = 6;
  config.search.threshold = 0.5;
  config.search.max_steps = 44;
  config.mcts.iterations_per_move = 77;
  config.mcts.exploration_constant = 1.25;
  CHECK(parse_experiment_config(serialize_experiment_config(config)) == config);

  ExperimentConfig defaults;
  CHECK(parse_experiment_config(serialize_experiment_config(defaults)) == defaults);

  CHECK_THROWS_AS(parse_experiment_config("variant sideways\n"), ConfigInfeasible);
  CHECK_THROWS_AS(parse_experiment_config("iterations banana\n"), ConfigInfeasible);
}

TEST_CASE("metric tables have the published shape and reload losslessly") {
  std::vector<ExperimentRow> rows;
  rows.push_back(fake_row("human", 4.0));
  for (int v = 0; v < 2; ++v) {
    for (int i = 1; i <= 5; ++i) {
      rows.push_back(fake_row((v == 0 ? "term-" : "noterm-") + std::to_string(i),
                              0.5 + v + i));
    }
  }

  std::string md = render_metrics_md(rows);
  auto md_lines = lines_of(md);
  REQUIRE(md_lines.size() == 13);  // header + divider + human + 10 iteration rows
  CHECK(md_lines[0].find("| Game set |") == 0);
  CHECK(md_lines[2].find("| human |") == 0);
  // four metrics per agent, two agents: 9 columns -> 10 pipe separators
  int pipes = 0;
  for (char c : md_lines[0]) pipes += (c == '|') ? 1 : 0;
  CHECK(pipes == 10);

  std::string csv = render_metrics_csv(rows);
  auto csv_lines = lines_of(csv);
  REQUIRE(csv_lines.size() == 23);  // header + 11 rows x 2 agents
  CHECK(csv_lines[0] ==
        "label,agent,games_completed,avg_score,stddev_score,max_score,avg_moves,stddev_moves");

  std::vector<ExperimentRow> reloaded = load_metrics_csv(csv);
  REQUIRE(reloaded.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(reloaded[i].label == rows[i].label);
    CHECK(reloaded[i].report.mcts.avg_score == rows[i].report.mcts.avg_score);
    CHECK(reloaded[i].report.mcts.stddev_score == rows[i].report.mcts.stddev_score);
    CHECK(reloaded[i].report.random.avg_moves == rows[i].report.random.avg_moves);
    CHECK(reloaded[i].report.random.max_score == rows[i].report.random.max_score);
  }
  CHECK(render_metrics_csv(reloaded) == csv);

  // values that need more than 10 significant digits still render/reload
  // to a fixed point: the re-rendered bytes are stable
  ExperimentRow ugly = fake_row("ugly", 1.0);
  ugly.report.mcts.stddev_score = 1.0 / 3.0;
  ugly.report.random.avg_score = 2.0 / 7.0;
  std::string ugly_csv = render_metrics_csv({ugly});
  CHECK(render_metrics_csv(load_metrics_csv(ugly_csv)) == ugly_csv);
}

TEST_CASE("a small end-to-end run archives everything it used") {
  fs::path out = testutil::scratch_dir("exp_small");
  ExperimentConfig config = small_config(out.string());
  ExperimentReport report = run_experiment(config);

  REQUIRE(report.complete);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].label == "human");
  CHECK(report.rows[1].label == "term-1");
  for (const auto& row : report.rows) {
    CHECK(row.report.n_games == 8);
    CHECK(row.report.move_cap == config.move_cap);
  }

  CHECK(fs::exists(out / "config.txt"));
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "report.md"));
  CHECK(fs::exists(out / "report.csv"));
  for (int j = 0; j < 8; ++j) {
    CHECK(fs::exists(out / "term" / "iter0" / ("game" + std::to_string(j) + ".desc")));
    CHECK(fs::exists(out / "term" / "iter0" / ("game" + std::to_string(j) + ".lvl")));
    CHECK(fs::exists(out / "term" / "iter1" / ("game" + std::to_string(j) + ".desc")));
  }
  CHECK(fs::exists(out / "term" / "iter0" / "model.rf"));
  CHECK(fs::exists(out / "term" / "iter1" / "model.rf"));
  CHECK(fs::exists(out / "term" / "iter1" / "trace.csv"));
  CHECK(!fs::exists(out / "term" / "iter0" / "trace.csv"));  // iteration 0 has no climb
  CHECK(!fs::exists(out / "noterm"));                        // untouched variant

  // the stored config reproduces the one we ran
  CHECK(parse_experiment_config(read_file((out / "config.txt").string())) == config);

  // archived games parse and carry the termination-variant model schema
  std::vector<Game> games = load_games((out / "term" / "iter1").string());
  REQUIRE(games.size() == 8);
  Forest model = load_forest((out / "term" / "iter1" / "model.rf").string());
  CHECK_NOTHROW(require_schema(model, schema_default(true)));
  CHECK(model.trees.size() == 12);

  // the tables on disk re-render from the archived metrics alone
  std::vector<ExperimentRow> reloaded =
      load_metrics_csv(read_file((out / "metrics.csv").string()));
  CHECK(render_metrics_md(reloaded) == read_file((out / "report.md").string()));
  CHECK(render_metrics_csv(reloaded) == read_file((out / "report.csv").string()));
}

TEST_CASE("the same config and seed rerun byte-identically") {
  fs::path out1 = testutil::scratch_dir("exp_rerun_a");
  fs::path out2 = testutil::scratch_dir("exp_rerun_b");
  ExperimentConfig c1 = small_config(out1.string());
  ExperimentConfig c2 = small_config(out2.string());
  run_experiment(c1);
  run_experiment(c2);

  for (const char* rel : {"metrics.csv", "report.md", "report.csv",
                          "term/iter0/model.rf", "term/iter1/model.rf",
                          "term/iter1/trace.csv"}) {
    INFO("file ", rel);
    CHECK(read_file((out1 / rel).string()) == read_file((out2 / rel).string()));
  }
  for (int j = 0; j < 8; ++j) {
    std::string rel = "term/iter1/game" + std::to_string(j);
    CHECK(read_file((out1 / (rel + ".desc")).string()) ==
          read_file((out2 / (rel + ".desc")).string()));
    CHECK(read_file((out1 / (rel + ".lvl")).string()) ==
          read_file((out2 / (rel + ".lvl")).string()));
  }
}

TEST_CASE("variant labels and sentinel level size resolve as documented") {
  CHECK(std::string(to_string(Variant::Term)) == "term");
  CHECK(std::string(to_string(Variant::NoTerm)) == "noterm");
  CHECK(std::string(to_string(Variant::Both)) == "both");

  // width/height 0 means "use the corpus's modal size": the archived
  // random games of the small run are 12x9
  fs::path out = testutil::scratch_dir("exp_modal");
  ExperimentConfig config = small_config(out.string());
  REQUIRE(config.gen.level_width == 0);
  run_experiment(config);
  std::vector<Game> games = load_games((out / "term" / "iter0").string());
  REQUIRE(games.size() == 8);
  for (const auto& g : games) {
    CHECK(g.level.width == 12);
    CHECK(g.level.height == 9);
  }
}

TEST_CASE("the command line front end enforces its contract") {
  // unknown subcommand and bad flag values are usage errors: exit 2
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("vectorize --schema sideways a b") == 2);
  CHECK(run_cli("--help") == 0);

  // missing files are runtime errors: exit 1
  CHECK(run_cli("play --game /nonexistent/game --agent random") == 1);

  // a real playout works end to end
  std::string corpus = testutil::corpus_dir();
  CHECK(run_cli("play --game " + corpus + "/chase --agent mcts --seed 1"
                " --mcts-iterations 20 --move-cap 40") == 0);
  CHECK(run_cli("play --game " + corpus + "/blaster --agent random --seed 2") == 0);

  // generate then vectorize through the CLI
  fs::path dir = testutil::scratch_dir("cli_gen");
  CHECK(run_cli("gen --seed 4 --count 2 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "game0.desc"));
  CHECK(fs::exists(dir / "game1.lvl"));
  CHECK(run_cli("vectorize " + (dir / "game0.desc").string() + " " +
                (dir / "game0.lvl").string() + " --schema term") == 0);
}

}  // TEST_SUITE
