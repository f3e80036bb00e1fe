#include "forge/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/features.hpp"
#include "forge/util.hpp"

namespace fs = std::filesystem;

namespace forge {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Term: return "term";
    case Variant::NoTerm: return "noterm";
    case Variant::Both: return "both";
  }
  return "?";
}

std::string serialize_experiment_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "variant " << to_string(c.variant) << "\n";
  out << "iterations " << c.n_iterations << "\n";
  out << "seed " << c.seed << "\n";
  out << "out " << c.out_dir << "\n";
  out << "corpus " << c.corpus_dir << "\n";
  out << "move_cap " << c.move_cap << "\n";
  out << "replicates " << c.replicates << "\n";
  out << "threshold " << format_full(c.search.threshold) << "\n";
  out << "neighbors_per_step " << c.search.neighbors_per_step << "\n";
  out << "max_steps " << c.search.max_steps << "\n";
  out << "restarts " << (c.search.restarts_allowed ? 1 : 0) << "\n";
  out << "restart_budget " << c.search.restart_budget << "\n";
  out << "trees " << c.forest.n_trees << "\n";
  out << "max_depth " << c.forest.max_depth << "\n";
  out << "min_samples_split " << c.forest.min_samples_split << "\n";
  out << "features_per_split " << c.forest.features_per_split << "\n";
  out << "bootstrap " << (c.forest.bootstrap ? 1 : 0) << "\n";
  out << "mcts_iterations " << c.mcts.iterations_per_move << "\n";
  out << "rollout_depth " << c.mcts.rollout_depth << "\n";
  out << "exploration_constant " << format_full(c.mcts.exploration_constant) << "\n";
  out << "sprites " << c.gen.min_sprites << " " << c.gen.max_sprites << "\n";
  out << "interactions " << c.gen.min_interactions << " " << c.gen.max_interactions << "\n";
  out << "terminations " << c.gen.min_terminations << " " << c.gen.max_terminations << "\n";
  out << "level " << c.gen.level_width << " " << c.gen.level_height << "\n";
  out << "modifier_probability " << format_full(c.gen.modifier_probability) << "\n";
  out << "sanity_moves " << c.gen.sanity_moves << "\n";
  out << "level_capacity " << c.gen.level_capacity << "\n";
  return out.str();
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig c;
  auto bad = [](const std::string& line) {
    throw ConfigInfeasible("bad config line: " + line);
  };
  auto want_int = [&](const std::vector<std::string>& tok, const std::string& line) {
    if (tok.size() != 2) bad(line);
    auto v = parse_int(tok[1]);
    if (!v) bad(line);
    return static_cast<int>(*v);
  };
  auto want_double = [&](const std::vector<std::string>& tok, const std::string& line) {
    if (tok.size() != 2) bad(line);
    auto v = parse_double(tok[1]);
    if (!v) bad(line);
    return *v;
  };
  auto want_pair = [&](const std::vector<std::string>& tok, const std::string& line) {
    if (tok.size() != 3) bad(line);
    auto a = parse_int(tok[1]);
    auto b = parse_int(tok[2]);
    if (!a || !b) bad(line);
    return std::pair<int, int>(static_cast<int>(*a), static_cast<int>(*b));
  };

  for (const std::string& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto tok = split_ws(line);
    const std::string& key = tok[0];
    if (key == "variant") {
      if (tok.size() != 2) bad(line);
      if (tok[1] == "term") {
        c.variant = Variant::Term;
      } else if (tok[1] == "noterm") {
        c.variant = Variant::NoTerm;
      } else if (tok[1] == "both") {
        c.variant = Variant::Both;
      } else {
        bad(line);
      }
    } else if (key == "iterations") {
      c.n_iterations = want_int(tok, line);
    } else if (key == "seed") {
      if (tok.size() != 2) bad(line);
      errno = 0;
      char* end = nullptr;
      c.seed = std::strtoull(tok[1].c_str(), &end, 10);
      if (errno != 0 || end != tok[1].c_str() + tok[1].size()) bad(line);
    } else if (key == "out") {
      if (tok.size() != 2) bad(line);
      c.out_dir = tok[1];
    } else if (key == "corpus") {
      if (tok.size() != 2) bad(line);
      c.corpus_dir = tok[1];
    } else if (key == "move_cap") {
      c.move_cap = want_int(tok, line);
    } else if (key == "replicates") {
      c.replicates = want_int(tok, line);
    } else if (key == "threshold") {
      c.search.threshold = want_double(tok, line);
    } else if (key == "neighbors_per_step") {
      c.search.neighbors_per_step = want_int(tok, line);
    } else if (key == "max_steps") {
      c.search.max_steps = want_int(tok, line);
    } else if (key == "restarts") {
      c.search.restarts_allowed = want_int(tok, line) != 0;
    } else if (key == "restart_budget") {
      c.search.restart_budget = want_int(tok, line);
    } else if (key == "trees") {
      c.forest.n_trees = want_int(tok, line);
    } else if (key == "max_depth") {
      c.forest.max_depth = want_int(tok, line);
    } else if (key == "min_samples_split") {
      c.forest.min_samples_split = want_int(tok, line);
    } else if (key == "features_per_split") {
      c.forest.features_per_split = want_int(tok, line);
    } else if (key == "bootstrap") {
      c.forest.bootstrap = want_int(tok, line) != 0;
    } else if (key == "mcts_iterations") {
      c.mcts.iterations_per_move = want_int(tok, line);
    } else if (key == "rollout_depth") {
      c.mcts.rollout_depth = want_int(tok, line);
    } else if (key == "exploration_constant") {
      c.mcts.exploration_constant = want_double(tok, line);
    } else if (key == "sprites") {
      std::tie(c.gen.min_sprites, c.gen.max_sprites) = want_pair(tok, line);
    } else if (key == "interactions") {
      std::tie(c.gen.min_interactions, c.gen.max_interactions) = want_pair(tok, line);
    } else if (key == "terminations") {
      std::tie(c.gen.min_terminations, c.gen.max_terminations) = want_pair(tok, line);
    } else if (key == "level") {
      std::tie(c.gen.level_width, c.gen.level_height) = want_pair(tok, line);
    } else if (key == "modifier_probability") {
      c.gen.modifier_probability = want_double(tok, line);
    } else if (key == "sanity_moves") {
      c.gen.sanity_moves = want_int(tok, line);
    } else if (key == "level_capacity") {
      c.gen.level_capacity = want_int(tok, line);
    } else {
      throw ConfigInfeasible("unknown config key: " + key);
    }
  }

  if (c.n_iterations < 0) throw ConfigInfeasible("iterations must be non-negative");
  if (c.move_cap < 1) throw ConfigInfeasible("move_cap must be positive");
  if (c.replicates < 1) throw ConfigInfeasible("replicates must be positive");
  if (c.search.threshold <= 0.0 || c.search.threshold > 1.0) {
    throw ConfigInfeasible("threshold must be in (0,1]");
  }
  return c;
}

std::vector<Game> load_games(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("game directory not found: " + dir);
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".desc") {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  std::vector<Game> games;
  for (const std::string& stem : stems) {
    fs::path base = fs::path(dir) / stem;
    games.push_back(parse_game(read_file(base.string() + ".desc"),
                               read_file(base.string() + ".lvl"), stem));
  }
  return games;
}

namespace {

void write_game_files(const fs::path& dir, const std::vector<Game>& games) {
  for (size_t j = 0; j < games.size(); ++j) {
    auto [desc, lvl] = serialize_game(games[j]);
    std::string base = (dir / ("game" + std::to_string(j))).string();
    write_file(base + ".desc", desc);
    write_file(base + ".lvl", lvl);
  }
}

void write_traces(const fs::path& path, const std::vector<std::vector<double>>& traces) {
  std::ostringstream out;
  out << "game,step,fitness\n";
  for (size_t g = 0; g < traces.size(); ++g) {
    for (size_t s = 0; s < traces[g].size(); ++s) {
      out << g << "," << s << "," << format_full(traces[g][s]) << "\n";
    }
  }
  write_file(path.string(), out.str());
}

std::string metric_cells_csv(const AgentMetrics& m) {
  std::ostringstream out;
  out << format_number(m.games_completed) << "," << format_number(m.avg_score) << ","
      << format_number(m.stddev_score) << "," << format_number(m.max_score) << ","
      << format_number(m.avg_moves) << "," << format_number(m.stddev_moves);
  return out.str();
}

}  // namespace

std::string render_metrics_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "label,agent,games_completed,avg_score,stddev_score,max_score,avg_moves,stddev_moves\n";
  for (const auto& row : rows) {
    out << row.label << ",mcts," << metric_cells_csv(row.report.mcts) << "\n";
    out << row.label << ",random," << metric_cells_csv(row.report.random) << "\n";
  }
  return out.str();
}

std::string render_metrics_md(const std::vector<ExperimentRow>& rows) {
  auto cells = [](const AgentMetrics& m) {
    std::ostringstream out;
    out << format_number(m.games_completed) << " | " << format_number(m.avg_score) << " ± "
        << format_number(m.stddev_score) << " | " << format_number(m.max_score) << " | "
        << format_number(m.avg_moves) << " ± " << format_number(m.stddev_moves);
    return out.str();
  };
  std::ostringstream out;
  out << "| Game set | MCTS completed | MCTS avg score | MCTS max score | MCTS avg moves | "
         "Random completed | Random avg score | Random max score | Random avg moves |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    out << "| " << row.label << " | " << cells(row.report.mcts) << " | "
        << cells(row.report.random) << " |\n";
  }
  return out.str();
}

std::vector<ExperimentRow> load_metrics_csv(const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw IoError("empty metrics file");
  std::vector<ExperimentRow> rows;
  auto split_csv = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    return fields;
  };
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto f = split_csv(lines[i]);
    if (f.size() != 8) throw IoError("bad metrics line: " + lines[i]);
    AgentMetrics m;
    auto num = [&](size_t idx) {
      auto v = parse_double(f[idx]);
      if (!v) throw IoError("bad number in metrics line: " + lines[i]);
      return *v;
    };
    m.games_completed = num(2);
    m.avg_score = num(3);
    m.stddev_score = num(4);
    m.max_score = num(5);
    m.avg_moves = num(6);
    m.stddev_moves = num(7);
    if (rows.empty() || rows.back().label != f[0]) {
      rows.push_back(ExperimentRow{f[0], {}});
    }
    if (f[1] == "mcts") {
      rows.back().report.mcts = m;
    } else if (f[1] == "random") {
      rows.back().report.random = m;
    } else {
      throw IoError("unknown agent in metrics line: " + lines[i]);
    }
  }
  return rows;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  Corpus corpus = load_corpus(config.corpus_dir);

  ExperimentConfig resolved = config;
  if (resolved.gen.level_width == 0 || resolved.gen.level_height == 0) {
    auto [w, h] = most_common_level_size(corpus);
    resolved.gen.level_width = w;
    resolved.gen.level_height = h;
  }
  check_config(resolved.gen);

  fs::create_directories(resolved.out_dir);
  write_file((fs::path(resolved.out_dir) / "config.txt").string(),
             serialize_experiment_config(resolved));

  ExperimentReport report;
  report.complete = true;
  report.rows.push_back(ExperimentRow{
      "human", evaluate_batch(corpus.games(), resolved.mcts,
                              derive_seed(resolved.seed, "eval-human"), resolved.move_cap,
                              resolved.replicates)});

  std::vector<Variant> variants;
  if (resolved.variant == Variant::Term || resolved.variant == Variant::Both) {
    variants.push_back(Variant::Term);
  }
  if (resolved.variant == Variant::NoTerm || resolved.variant == Variant::Both) {
    variants.push_back(Variant::NoTerm);
  }

  for (Variant v : variants) {
    const char* vname = to_string(v);
    FeatureSchema schema = schema_default(v == Variant::Term);
    IterationArchive archive =
        adversarial_loop(corpus, resolved.gen, resolved.forest, resolved.search,
                         resolved.n_iterations, schema, derive_seed(resolved.seed, vname));
    report.complete = report.complete && archive.complete;

    fs::path vdir = fs::path(resolved.out_dir) / vname;
    fs::path iter0 = vdir / "iter0";
    fs::create_directories(iter0);
    write_game_files(iter0, archive.random_games);
    save_forest(archive.initial_forest, (iter0 / "model.rf").string());
    for (size_t i = 0; i < archive.iterations.size(); ++i) {
      const IterationRecord& record = archive.iterations[i];
      fs::path idir = vdir / ("iter" + std::to_string(i + 1));
      fs::create_directories(idir);
      write_game_files(idir, record.batch);
      save_forest(record.forest_after, (idir / "model.rf").string());
      write_traces(idir / "trace.csv", record.traces);

      std::string label = std::string(vname) + "-" + std::to_string(i + 1);
      report.rows.push_back(ExperimentRow{
          label, evaluate_batch(record.batch, resolved.mcts,
                                derive_seed(resolved.seed, std::string("eval-") + vname, i + 1),
                                resolved.move_cap, resolved.replicates)});
    }
  }

  std::string csv = render_metrics_csv(report.rows);
  write_file((fs::path(resolved.out_dir) / "metrics.csv").string(), csv);
  write_file((fs::path(resolved.out_dir) / "report.csv").string(), csv);
  write_file((fs::path(resolved.out_dir) / "report.md").string(),
             render_metrics_md(report.rows));
  return report;
}

}  // namespace forge
