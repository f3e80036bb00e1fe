#pragma once

#include <string>
#include <vector>

#include "forge/agents.hpp"
#include "forge/search.hpp"

namespace forge {

enum class Variant { Term, NoTerm, Both };

const char* to_string(Variant v);

struct ExperimentConfig {
  Variant variant = Variant::Both;
  int n_iterations = 5;
  uint64_t seed = 0;
  std::string out_dir = "runs/default";
  std::string corpus_dir = "corpus";
  int move_cap = 700;
  int replicates = 1;
  GenConfig gen;  // level_width/height 0 = use the corpus's modal size
  ForestParams forest;
  SearchConfig search;
  MctsParams mcts;

  ExperimentConfig() {
    gen.level_width = 0;
    gen.level_height = 0;
  }

  bool operator==(const ExperimentConfig&) const = default;
};

// Plain-text "key value" round trip (exact, including doubles). parse
// throws ConfigInfeasible on malformed or infeasible input.
std::string serialize_experiment_config(const ExperimentConfig& config);
ExperimentConfig parse_experiment_config(const std::string& text);

struct ExperimentRow {
  std::string label;  // "human", "term-1", ..., "noterm-5"
  IterationReport report;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  bool complete = false;
};

// Full pipeline for the configured variant(s): adversarial loop, archive
// of every batch/model/trace under out_dir, evaluation of the human corpus
// and each generated batch, and rendered metric tables. Deterministic
// under (config, seed): reruns write byte-identical files.
//
// Layout: <out>/config.txt, <out>/metrics.csv, <out>/report.{md,csv}, and
// per variant <out>/<variant>/iter<i>/{game<j>.desc, game<j>.lvl,
// model.rf, trace.csv} (iteration 0 archives the random training games
// and initial model; it has no trace).
ExperimentReport run_experiment(const ExperimentConfig& config);

// Table rendering. csv: one line per (row, agent). md: a Table-1-shaped
// pipe table, one row per label, agents side by side.
std::string render_metrics_csv(const std::vector<ExperimentRow>& rows);
std::string render_metrics_md(const std::vector<ExperimentRow>& rows);

// Re-renders tables from an experiment directory's metrics.csv.
std::vector<ExperimentRow> load_metrics_csv(const std::string& text);

// Loads every game<j>.desc/.lvl pair in a directory, sorted by name.
// Unlike the corpus loader this accepts any count and needs no witnesses.
std::vector<Game> load_games(const std::string& dir);

}  // namespace forge
