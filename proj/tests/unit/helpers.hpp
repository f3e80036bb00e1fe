#pragma once

#include <filesystem>
#include <string>

#include "forge/vgdl.hpp"

// Shared fixtures for the unit suites: canonical tiny games and paths into
// the source tree (corpus, tools) resolved via the build-time define.

namespace testutil {

inline std::string source_dir() { return FORGE_SOURCE_DIR; }

inline std::string corpus_dir() { return source_dir() + "/corpus"; }

// Fresh scratch directory under the system temp root; wiped on entry so
// reruns start clean.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("forge_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// 3x3 wall ring with the avatar in the middle; walking into a wall steps
// back. Wins by outlasting the 100-tick clock.
inline const char* kRingDesc =
    "SpriteSet\n"
    "    avatar > MovingAvatar\n"
    "    wall > Immovable\n"
    "InteractionSet\n"
    "    avatar wall > StepBack\n"
    "TerminationSet\n"
    "    Timeout limit=100 win=True\n"
    "    SpriteCounter sprite=avatar limit=0 win=False\n"
    "LevelMapping\n"
    "    A > avatar\n"
    "    w > wall\n";

inline const char* kRingLvl =
    "www\n"
    "wAw\n"
    "www\n";

inline forge::Game ring_game() { return forge::parse_game(kRingDesc, kRingLvl, "ring"); }

// Open 5x5 room, no walls: every move is legal everywhere, handy for
// distribution checks.
inline forge::Game open_room() {
  return forge::parse_game(
      "SpriteSet\n"
      "    avatar > MovingAvatar\n"
      "InteractionSet\n"
      "TerminationSet\n"
      "    Timeout limit=500 win=True\n"
      "    SpriteCounter sprite=avatar limit=0 win=False\n"
      "LevelMapping\n"
      "    A > avatar\n",
      ".....\n"
      ".....\n"
      "..A..\n"
      ".....\n"
      ".....\n",
      "room");
}

// One-row corridor: the avatar starts three cells left of a goal tile that
// dies on contact and wins the game.
inline forge::Game corridor_game() {
  return forge::parse_game(
      "SpriteSet\n"
      "    avatar > MovingAvatar\n"
      "    goal > Immovable\n"
      "InteractionSet\n"
      "    goal avatar > KillSprite scoreChange=1\n"
      "TerminationSet\n"
      "    SpriteCounter sprite=goal limit=0 win=True\n"
      "    Timeout limit=50 win=False\n"
      "LevelMapping\n"
      "    A > avatar\n"
      "    g > goal\n",
      "A..g\n",
      "corridor");
}

// Ends in a win on tick `limit` no matter what anyone does.
inline forge::Game timeout_game(int limit, bool win = true) {
  std::string desc =
      "SpriteSet\n"
      "    avatar > MovingAvatar\n"
      "InteractionSet\n"
      "TerminationSet\n";
  desc += "    Timeout limit=" + std::to_string(limit) + (win ? " win=True\n" : " win=False\n");
  desc += win ? "    SpriteCounter sprite=avatar limit=0 win=False\n"
              : "    SpriteCounter sprite=avatar limit=0 win=True\n";
  desc +=
      "LevelMapping\n"
      "    A > avatar\n";
  return forge::parse_game(desc, "A..\n...\n", "timeout");
}

// No termination can fire before the move cap: the counter watches a wall
// nothing ever kills and the clock is far beyond any cap used in tests.
inline forge::Game unreachable_game() {
  return forge::parse_game(
      "SpriteSet\n"
      "    avatar > MovingAvatar\n"
      "    wall > Immovable\n"
      "InteractionSet\n"
      "    avatar wall > StepBack\n"
      "TerminationSet\n"
      "    SpriteCounter sprite=wall limit=0 win=True\n"
      "    Timeout limit=100000 win=False\n"
      "LevelMapping\n"
      "    A > avatar\n"
      "    w > wall\n",
      "wA.\n"
      "...\n",
      "unreachable");
}

}  // namespace testutil
