#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "forge/engine.hpp"
#include "forge/vgdl.hpp"

namespace forge {

constexpr int kCorpusSize = 8;

// Witness action sequences are recorded against this engine seed; replay
// must end in a Win.
constexpr uint64_t kWitnessSeed = 0;

struct CorpusEntry {
  Game game;
  std::vector<Action> witness;
};

struct Corpus {
  std::vector<CorpusEntry> entries;

  std::vector<Game> games() const;
};

// Loads `dir` containing exactly kCorpusSize .desc/.lvl pairs plus
// witness/<name>.moves files (one action token per line). Every game must
// parse, survive a 50-move random crash check, and win under its witness.
// Throws WrongCount, ParseError, IoError, or UnplayableGame.
Corpus load_corpus(const std::string& dir);

// Parses one witness file body.
std::vector<Action> parse_witness(const std::string& text);

// Replays actions from init_state(game, kWitnessSeed); true iff the game
// is won by the end of the sequence.
bool witness_wins(const Game& game, const std::vector<Action>& witness);

// Modal (width, height) pair; ties break to the larger area, then the
// larger width.
std::pair<int, int> most_common_level_size(const Corpus& corpus);

}  // namespace forge
