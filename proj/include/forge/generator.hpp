#pragma once

#include <string>

#include "forge/rng.hpp"
#include "forge/vgdl.hpp"

namespace forge {

struct GenConfig {
  int min_sprites = 3;
  int max_sprites = 8;
  int min_interactions = 2;
  int max_interactions = 6;
  int min_terminations = 2;
  int max_terminations = 3;
  int level_width = 12;
  int level_height = 9;
  double modifier_probability = 0.3;
  int sanity_moves = 50;
  int level_capacity = 358;  // mutations never grow the grid past this

  bool operator==(const GenConfig&) const = default;
};

// Plain-text "key value" round trip; parse throws ConfigInfeasible on
// malformed input or an infeasible configuration.
std::string serialize_gen_config(const GenConfig& config);
GenConfig parse_gen_config(const std::string& text);
void check_config(const GenConfig& config);

// Fresh random game: one avatar, k sprites, random interactions and
// terminations (always at least one win and one loss), i.i.d. level fill
// with exactly one avatar cell. Throws ConfigInfeasible if no valid game
// emerges within a bounded number of resamples.
Game random_game(const GenConfig& config, Rng& rng);

// True iff a random agent survives `sanity_moves` steps (or terminates
// in-game) without an engine error.
bool sanity_check(const Game& game, int sanity_moves, Rng& rng);

// Replaces exactly one rule (sprite, interaction, or termination, chosen
// uniformly over all rules) with a fresh random rule of the same kind; the
// replacement always differs from the original, counts stay fixed, and
// win/loss coverage is preserved.
Game rule_neighbor(const Game& game, const GenConfig& config, Rng& rng);

// One of two mutations, coin-flipped: retile 1..10 distinct non-avatar
// cells (each forced to change), or insert/delete one row or column.
// Dimension changes respect config.level_capacity; exactly one avatar
// survives either way.
Game level_neighbor(const Game& game, const GenConfig& config, Rng& rng);

// 50/50 rule or level mutation; the search neighborhood.
Game neighbor(const Game& game, const GenConfig& config, Rng& rng);

// Modifiers the generator attaches stochastically (speed, cooldown, limit,
// orientation on sprites; nonzero scoreChange on interactions). Spawn
// targets are structural and excluded.
bool has_random_modifier(const Game& game);

}  // namespace forge
