#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

// The game dialect: 11 sprite classes, 6 interaction effects, 2
// termination kinds. Grammar in docs/dialect.md.

enum class SpriteClass {
  Immovable,
  Passive,
  Missile,
  RandomNPC,
  Chaser,
  Fleeing,
  SpawnPoint,
  Portal,
  Resource,
  MovingAvatar,
  ShootAvatar,
};
constexpr int kSpriteClassCount = 11;

enum class Orientation { Up, Down, Left, Right };

enum class EffectKind {
  KillSprite,
  KillBoth,
  StepBack,
  TransformTo,
  CollectResource,
  SpawnBehind,
};
constexpr int kEffectCount = 6;

enum class TerminationKind { SpriteCounter, Timeout };

constexpr char kBlankChar = '.';
constexpr std::string_view kEosToken = "EOS";

const char* to_string(SpriteClass c);
const char* to_string(Orientation o);
const char* to_string(EffectKind e);
std::optional<SpriteClass> sprite_class_from(std::string_view s);
std::optional<Orientation> orientation_from(std::string_view s);
std::optional<EffectKind> effect_from(std::string_view s);

bool is_avatar_class(SpriteClass c);

// One sprite definition. Modifier fields hold only what the source text
// stated; engine defaults are applied at simulation time (docs/engine.md),
// which keeps serialization canonical.
struct SpriteDef {
  std::string name;
  SpriteClass cls = SpriteClass::Immovable;
  std::optional<double> speed;          // cells per tick
  std::optional<int> cooldown;          // ticks to wait between acts
  std::optional<int> limit;             // spawn budget / live-shot cap
  std::optional<Orientation> orientation;
  std::optional<std::string> spawn_target;  // SpawnPoint / ShootAvatar only

  bool has_any_modifier() const {
    return speed || cooldown || limit || orientation;
  }
  bool operator==(const SpriteDef&) const = default;
};

struct InteractionDef {
  std::string actor;
  std::string other;  // sprite name or EOS
  EffectKind effect = EffectKind::KillSprite;
  std::optional<std::string> effect_target;  // TransformTo / SpawnBehind only
  int score_change = 0;

  bool operator==(const InteractionDef&) const = default;
};

struct TerminationDef {
  TerminationKind kind = TerminationKind::Timeout;
  std::optional<std::string> sprite;  // SpriteCounter only
  int limit = 0;                      // count or ticks
  bool win = false;

  bool operator==(const TerminationDef&) const = default;
};

struct GameSpec {
  std::vector<SpriteDef> sprites;
  std::vector<InteractionDef> interactions;
  std::vector<TerminationDef> terminations;
  std::map<char, std::vector<std::string>> level_mapping;

  int sprite_index(std::string_view name) const;  // -1 when absent
  const SpriteDef* find_sprite(std::string_view name) const;
  int avatar_index() const;  // -1 when absent
  char avatar_char() const;  // '\0' when absent

  bool operator==(const GameSpec&) const = default;
};

struct Level {
  int width = 0;
  int height = 0;
  std::vector<char> cells;  // row-major, height*width

  char at(int col, int row) const { return cells[static_cast<size_t>(row) * width + col]; }
  char& at(int col, int row) { return cells[static_cast<size_t>(row) * width + col]; }
  bool in_bounds(int col, int row) const {
    return col >= 0 && col < width && row >= 0 && row < height;
  }
  static Level blank(int width, int height) {
    return Level{width, height, std::vector<char>(static_cast<size_t>(width) * height, kBlankChar)};
  }

  bool operator==(const Level&) const = default;
};

struct Game {
  GameSpec spec;
  Level level;
  std::string name;

  bool operator==(const Game&) const = default;
};

// Parses a description/level pair into a validated Game. Throws ParseError
// naming the offending line; never aborts. Insensitive to trailing
// whitespace and blank lines; `#` starts a comment line.
Game parse_game(const std::string& description_text, const std::string& level_text,
                const std::string& name = "");

// Canonical serialization: structurally equal games produce identical
// bytes, and parse_game(serialize_game(g)) == g (given the same name).
std::pair<std::string, std::string> serialize_game(const Game& game);

// Re-checks every invariant on an already-built Game. Throws ParseError
// (line 0) on violation. The parser calls this; generators rely on it.
void validate_game(const Game& game);

}  // namespace forge
