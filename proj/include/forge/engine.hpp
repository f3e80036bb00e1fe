#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "forge/rng.hpp"
#include "forge/vgdl.hpp"

namespace forge {

// Discrete-time simulator. Semantics in docs/engine.md.

enum class Action { Nil, Up, Down, Left, Right, Use };
constexpr int kActionCount = 6;

const char* to_string(Action a);
std::optional<Action> action_from(std::string_view s);

enum class Outcome { Ongoing, Win, Loss };

struct SpriteInstance {
  int id = 0;         // creation order, unique within a state
  int def_index = 0;  // into spec.sprites
  int col = 0, row = 0;
  int prev_col = 0, prev_row = 0;  // position at start of the current tick
  bool alive = true;
  Orientation facing = Orientation::Right;
  int cooldown_left = 0;
  double move_budget = 0.0;  // fractional-speed accumulator
  int spawned_total = 0;     // SpawnPoint bookkeeping
  int parent_id = -1;        // spawner instance, -1 for level-born sprites
};

struct EngineEvent {
  enum class Kind { Interaction, Termination };
  Kind kind = Kind::Interaction;
  int tick = 0;
  std::string actor;
  std::string other;       // sprite name, EOS, or "" for terminations
  EffectKind effect = EffectKind::KillSprite;
  int score_change = 0;
  bool win = false;  // terminations only
};

// Live instances are capped so spawner loops cannot blow up a playout.
constexpr int kMaxInstances = 4096;

struct GameState {
  std::shared_ptr<const Game> game;
  std::vector<SpriteInstance> instances;
  long long score = 0;
  int tick = 0;
  Rng rng;
  Outcome outcome = Outcome::Ongoing;
  int next_id = 0;
  bool log_events = false;
  std::vector<EngineEvent> events;
  std::map<std::string, int> resources;  // CollectResource tallies by sprite name

  int alive_count(int def_index) const;
  const SpriteInstance* avatar() const;  // nullptr when dead/absent

  // Deterministic text dump of the full dynamic state, for replay tests.
  std::string dump() const;
};

GameState init_state(std::shared_ptr<const Game> game, uint64_t seed);
GameState init_state(const Game& game, uint64_t seed);

// Advances one tick in place. Identity on terminal states. Throws
// EngineError only on structurally invalid games (dangling references).
void step(GameState& state, Action action);

// Actions that do anything for the current avatar class: Use is legal
// only for ShootAvatar. Returns {Nil} if no avatar is alive.
std::vector<Action> legal_actions(const GameState& state);

enum class PlayOutcome { Win, Loss, CapExit };
const char* to_string(PlayOutcome o);

struct PlayoutResult {
  PlayOutcome outcome = PlayOutcome::CapExit;
  long long score = 0;
  int moves = 0;
};

using AgentFn = std::function<Action(const GameState&)>;

// Runs an agent until in-game termination or move_cap moves. A cap exit
// is reported as PlayOutcome::CapExit, distinct from an in-game Loss.
PlayoutResult playout(const Game& game, const AgentFn& agent, uint64_t seed, int move_cap,
                      bool log_events = false, std::vector<EngineEvent>* events_out = nullptr);

}  // namespace forge
