#include "forge/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "forge/errors.hpp"
#include "forge/generator.hpp"
#include "forge/rng.hpp"
#include "forge/util.hpp"

namespace fs = std::filesystem;

namespace forge {

std::vector<Game> Corpus::games() const {
  std::vector<Game> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.game);
  return out;
}

std::vector<Action> parse_witness(const std::string& text) {
  std::vector<Action> actions;
  for (const std::string& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto action = action_from(line);
    if (!action) throw IoError("bad action token in witness: '" + line + "'");
    actions.push_back(*action);
  }
  return actions;
}

bool witness_wins(const Game& game, const std::vector<Action>& witness) {
  GameState state = init_state(game, kWitnessSeed);
  for (Action a : witness) {
    if (state.outcome != Outcome::Ongoing) break;
    step(state, a);
  }
  return state.outcome == Outcome::Win;
}

Corpus load_corpus(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir);
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".desc") {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  if (static_cast<int>(stems.size()) != kCorpusSize) {
    throw WrongCount("expected " + std::to_string(kCorpusSize) + " games in " + dir +
                     ", found " + std::to_string(stems.size()));
  }

  Corpus corpus;
  for (const std::string& stem : stems) {
    fs::path base = fs::path(dir) / stem;
    CorpusEntry entry;
    entry.game = parse_game(read_file(base.string() + ".desc"),
                            read_file(base.string() + ".lvl"), stem);

    Rng crash_rng(derive_seed(kWitnessSeed, "crash-check"));
    if (!sanity_check(entry.game, 50, crash_rng)) {
      throw UnplayableGame("game '" + stem + "' fails the random-agent crash check");
    }

    fs::path witness_path = fs::path(dir) / "witness" / (stem + ".moves");
    entry.witness = parse_witness(read_file(witness_path.string()));
    if (!witness_wins(entry.game, entry.witness)) {
      throw UnplayableGame("witness for '" + stem + "' does not reach a win");
    }
    corpus.entries.push_back(std::move(entry));
  }
  return corpus;
}

std::pair<int, int> most_common_level_size(const Corpus& corpus) {
  std::map<std::pair<int, int>, int> counts;
  for (const auto& e : corpus.entries) {
    counts[{e.game.level.width, e.game.level.height}] += 1;
  }
  std::pair<int, int> best{0, 0};
  int best_count = 0;
  for (const auto& [size, count] : counts) {
    long long area = static_cast<long long>(size.first) * size.second;
    long long best_area = static_cast<long long>(best.first) * best.second;
    bool wins = count > best_count ||
                (count == best_count &&
                 (area > best_area || (area == best_area && size.first > best.first)));
    if (wins) {
      best = size;
      best_count = count;
    }
  }
  return best;
}

}  // namespace forge
