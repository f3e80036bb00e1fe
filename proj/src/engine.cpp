#include "forge/engine.hpp"

#include <algorithm>
#include <sstream>

#include "forge/util.hpp"

namespace forge {

namespace {

constexpr const char* kActionNames[kActionCount] = {"Nil", "Up", "Down", "Left", "Right", "Use"};

// Engine defaults for absent modifiers (docs/engine.md). SpawnPoint gets a
// bounded default budget so undecorated spawners cannot flood a playout.
constexpr double kDefaultSpeed = 1.0;
constexpr int kDefaultSpawnCooldown = 2;
constexpr int kDefaultSpawnLimit = 20;
constexpr double kMaxSpeed = 8.0;

struct Delta {
  int dc, dr;
};

Delta delta_of(Orientation o) {
  switch (o) {
    case Orientation::Up: return {0, -1};
    case Orientation::Down: return {0, 1};
    case Orientation::Left: return {-1, 0};
    case Orientation::Right: return {1, 0};
  }
  return {0, 0};
}

std::optional<Orientation> orientation_of(Action a) {
  switch (a) {
    case Action::Up: return Orientation::Up;
    case Action::Down: return Orientation::Down;
    case Action::Left: return Orientation::Left;
    case Action::Right: return Orientation::Right;
    default: return std::nullopt;
  }
}

const SpriteDef& def_of(const GameState& s, const SpriteInstance& inst) {
  return s.game->spec.sprites[inst.def_index];
}

double speed_of(const SpriteDef& d) {
  double v = d.speed.value_or(kDefaultSpeed);
  return v > kMaxSpeed ? kMaxSpeed : v;
}

int cooldown_of(const SpriteDef& d) {
  if (d.cooldown) return *d.cooldown;
  return d.cls == SpriteClass::SpawnPoint ? kDefaultSpawnCooldown : 0;
}

int resolve_def(const GameState& s, const std::string& name) {
  int idx = s.game->spec.sprite_index(name);
  if (idx < 0) throw EngineError("unresolved sprite reference '" + name + "'");
  return idx;
}

int spawn_instance(GameState& s, int def_index, int col, int row, int parent_id) {
  if (s.next_id >= kMaxInstances) return -1;
  if (!s.game->level.in_bounds(col, row)) return -1;
  // never create a second live avatar
  if (is_avatar_class(s.game->spec.sprites[def_index].cls)) {
    for (const auto& inst : s.instances) {
      if (inst.alive && is_avatar_class(s.game->spec.sprites[inst.def_index].cls)) return -1;
    }
  }
  SpriteInstance inst;
  inst.id = s.next_id++;
  inst.def_index = def_index;
  inst.col = inst.prev_col = col;
  inst.row = inst.prev_row = row;
  inst.parent_id = parent_id;
  const SpriteDef& d = s.game->spec.sprites[def_index];
  inst.facing = d.orientation.value_or(Orientation::Right);
  s.instances.push_back(inst);
  return static_cast<int>(s.instances.size()) - 1;
}

void log_interaction(GameState& s, const InteractionDef& rule) {
  if (!s.log_events) return;
  EngineEvent ev;
  ev.kind = EngineEvent::Kind::Interaction;
  ev.tick = s.tick;
  ev.actor = rule.actor;
  ev.other = rule.other;
  ev.effect = rule.effect;
  ev.score_change = rule.score_change;
  s.events.push_back(ev);
}

// Applies one interaction effect to `actor_idx` (and possibly `other_idx`,
// -1 when the other side is EOS). Returns nothing; score/events recorded.
void apply_effect(GameState& s, const InteractionDef& rule, int actor_idx, int other_idx) {
  SpriteInstance& actor = s.instances[actor_idx];
  switch (rule.effect) {
    case EffectKind::KillSprite:
      actor.alive = false;
      break;
    case EffectKind::KillBoth:
      actor.alive = false;
      if (other_idx >= 0) s.instances[other_idx].alive = false;
      break;
    case EffectKind::StepBack:
      actor.col = actor.prev_col;
      actor.row = actor.prev_row;
      break;
    case EffectKind::TransformTo: {
      int target = resolve_def(s, *rule.effect_target);
      // never create a second live avatar
      if (is_avatar_class(s.game->spec.sprites[target].cls)) {
        bool avatar_alive = false;
        for (const auto& inst : s.instances) {
          if (inst.alive && inst.id != actor.id &&
              is_avatar_class(s.game->spec.sprites[inst.def_index].cls)) {
            avatar_alive = true;
            break;
          }
        }
        if (avatar_alive) break;
      }
      actor.def_index = target;
      actor.cooldown_left = 0;
      actor.move_budget = 0.0;
      actor.spawned_total = 0;
      break;
    }
    case EffectKind::CollectResource:
      actor.alive = false;
      s.resources[rule.actor] += 1;
      break;
    case EffectKind::SpawnBehind: {
      int target = resolve_def(s, *rule.effect_target);
      int col = other_idx >= 0 ? s.instances[other_idx].prev_col : actor.prev_col;
      int row = other_idx >= 0 ? s.instances[other_idx].prev_row : actor.prev_row;
      spawn_instance(s, target, col, row, actor.id);
      break;
    }
  }
  s.score += rule.score_change;
  log_interaction(s, rule);
}

// Moves an instance by one cell, firing (actor, EOS) interactions when the
// move would leave the grid. Off-grid moves never happen; with no EOS rule
// the move is simply cancelled.
void try_move(GameState& s, int idx, int dc, int dr) {
  SpriteInstance& inst = s.instances[idx];
  int nc = inst.col + dc;
  int nr = inst.row + dr;
  if (s.game->level.in_bounds(nc, nr)) {
    inst.col = nc;
    inst.row = nr;
    return;
  }
  const std::string& name = def_of(s, inst).name;
  for (const auto& rule : s.game->spec.interactions) {
    if (!s.instances[idx].alive) break;
    if (rule.actor == name && rule.other == kEosToken) {
      apply_effect(s, rule, idx, -1);
    }
  }
}

// One movement turn for an instance whose speed may be fractional: the
// budget accumulates and each whole point buys one sub-move.
template <typename MoveFn>
void run_submoves(GameState& s, int idx, double speed, MoveFn&& submove) {
  s.instances[idx].move_budget += speed;
  while (s.instances[idx].move_budget >= 1.0 && s.instances[idx].alive &&
         s.outcome == Outcome::Ongoing) {
    s.instances[idx].move_budget -= 1.0;
    submove();
  }
}

int find_avatar(const GameState& s) {
  for (size_t i = 0; i < s.instances.size(); ++i) {
    if (s.instances[i].alive && is_avatar_class(s.game->spec.sprites[s.instances[i].def_index].cls)) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

void avatar_phase(GameState& s, Action action) {
  int av = find_avatar(s);
  if (av < 0) return;
  const SpriteDef& d = def_of(s, s.instances[av]);

  if (auto dir = orientation_of(action)) {
    s.instances[av].facing = *dir;
    Delta dl = delta_of(*dir);
    run_submoves(s, av, speed_of(d), [&] { try_move(s, av, dl.dc, dl.dr); });
  } else if (action == Action::Use && d.cls == SpriteClass::ShootAvatar) {
    if (s.instances[av].cooldown_left > 0) {
      s.instances[av].cooldown_left -= 1;
      return;
    }
    if (!d.spawn_target) return;
    if (d.limit) {
      int live = 0;
      for (const auto& inst : s.instances) {
        if (inst.alive && inst.parent_id == s.instances[av].id) ++live;
      }
      if (live >= *d.limit) return;
    }
    int target = resolve_def(s, *d.spawn_target);
    Delta dl = delta_of(s.instances[av].facing);
    int spawned =
        spawn_instance(s, target, s.instances[av].col + dl.dc, s.instances[av].row + dl.dr,
                       s.instances[av].id);
    if (spawned >= 0 && !s.game->spec.sprites[target].orientation) {
      s.instances[spawned].facing = s.instances[av].facing;
    }
    s.instances[av].cooldown_left = cooldown_of(d);
  }
}

// Greedy Manhattan pursuit (Chaser) or avoidance (Fleeing) against the
// avatar position snapshotted at phase start (tc, tr; quarry=false when no
// avatar is alive). Candidate cells are the in-bounds neighbors; ties
// break via the state's stream.
void chase_move(GameState& s, int idx, bool toward, bool quarry, int tc, int tr) {
  SpriteInstance& inst = s.instances[idx];
  static constexpr Delta dirs[4] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
  if (!quarry) {
    // no quarry: wander
    Delta dl = dirs[s.rng.index(4)];
    try_move(s, idx, dl.dc, dl.dr);
    return;
  }
  int best = toward ? INT32_MAX : INT32_MIN;
  Delta winners[4];
  int n_winners = 0;
  for (const Delta& dl : dirs) {
    int nc = inst.col + dl.dc;
    int nr = inst.row + dl.dr;
    if (!s.game->level.in_bounds(nc, nr)) continue;
    int dist = std::abs(nc - tc) + std::abs(nr - tr);
    bool better = toward ? dist < best : dist > best;
    if (better) {
      best = dist;
      n_winners = 0;
    }
    if (dist == best) winners[n_winners++] = dl;
  }
  if (n_winners == 0) return;
  Delta dl = winners[s.rng.index(n_winners)];
  inst.col += dl.dc;
  inst.row += dl.dr;
}

void npc_phase(GameState& s) {
  size_t live_at_start = s.instances.size();
  int av = find_avatar(s);
  bool quarry = av >= 0;
  int av_col = quarry ? s.instances[av].col : 0;
  int av_row = quarry ? s.instances[av].row : 0;
  for (size_t i = 0; i < live_at_start && s.outcome == Outcome::Ongoing; ++i) {
    if (!s.instances[i].alive) continue;
    const SpriteDef& d = def_of(s, s.instances[i]);
    switch (d.cls) {
      case SpriteClass::Missile:
      case SpriteClass::RandomNPC:
      case SpriteClass::Chaser:
      case SpriteClass::Fleeing: {
        if (s.instances[i].cooldown_left > 0) {
          s.instances[i].cooldown_left -= 1;
          break;
        }
        int idx = static_cast<int>(i);
        if (d.cls == SpriteClass::Missile) {
          run_submoves(s, idx, speed_of(d), [&] {
            Delta dl = delta_of(s.instances[idx].facing);
            try_move(s, idx, dl.dc, dl.dr);
          });
        } else if (d.cls == SpriteClass::RandomNPC) {
          run_submoves(s, idx, speed_of(d), [&] {
            static constexpr Delta dirs[4] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
            Delta dl = dirs[s.rng.index(4)];
            try_move(s, idx, dl.dc, dl.dr);
          });
        } else {
          run_submoves(s, idx, speed_of(d), [&] {
            chase_move(s, idx, d.cls == SpriteClass::Chaser, quarry, av_col, av_row);
          });
        }
        s.instances[i].cooldown_left = cooldown_of(d);
        break;
      }
      case SpriteClass::SpawnPoint: {
        if (s.instances[i].cooldown_left > 0) {
          s.instances[i].cooldown_left -= 1;
          break;
        }
        if (!d.spawn_target) break;
        int limit = d.limit.value_or(kDefaultSpawnLimit);
        if (limit > 0 && s.instances[i].spawned_total >= limit) break;
        int target = resolve_def(s, *d.spawn_target);
        spawn_instance(s, target, s.instances[i].col, s.instances[i].row,
                       s.instances[i].id);
        s.instances[i].spawned_total += 1;
        s.instances[i].cooldown_left = cooldown_of(d);
        break;
      }
      default:
        break;  // static classes
    }
  }
}

void collision_phase(GameState& s) {
  // Pair universe is fixed at phase start: alive instances grouped by cell
  // (cells ascending, instance index ascending within a cell). Effects
  // applied mid-phase (StepBack moves, TransformTo def changes) do not
  // regroup, but alive state and defs are rechecked per application.
  thread_local std::vector<int> cell_count, cell_start, slot;
  thread_local std::vector<int> by_cell, crowded, actors, others;
  int width = s.game->level.width;
  int n_cells = width * s.game->level.height;
  cell_count.assign(n_cells, 0);
  int n_alive = 0;
  for (const auto& inst : s.instances) {
    if (!inst.alive) continue;
    cell_count[inst.row * width + inst.col] += 1;
    n_alive += 1;
  }
  cell_start.resize(n_cells + 1);
  crowded.clear();
  int acc = 0;
  for (int c = 0; c < n_cells; ++c) {
    cell_start[c] = acc;
    if (cell_count[c] >= 2) crowded.push_back(c);
    acc += cell_count[c];
  }
  cell_start[n_cells] = acc;
  if (crowded.empty()) return;
  slot.assign(cell_start.begin(), cell_start.end() - 1);
  by_cell.resize(n_alive);
  for (size_t i = 0; i < s.instances.size(); ++i) {
    if (!s.instances[i].alive) continue;
    int c = s.instances[i].row * width + s.instances[i].col;
    by_cell[slot[c]++] = static_cast<int>(i);
  }

  for (const auto& rule : s.game->spec.interactions) {
    if (rule.other == kEosToken) continue;  // handled at movement time
    int actor_def = s.game->spec.sprite_index(rule.actor);
    int other_def = s.game->spec.sprite_index(rule.other);
    if (actor_def < 0 || other_def < 0) continue;
    for (int c : crowded) {
      actors.clear();
      others.clear();
      for (int k = cell_start[c]; k < cell_start[c + 1]; ++k) {
        int idx = by_cell[k];
        if (!s.instances[idx].alive) continue;
        if (s.instances[idx].def_index == actor_def) actors.push_back(idx);
        if (s.instances[idx].def_index == other_def) others.push_back(idx);
      }
      if (actors.empty() || others.empty()) continue;
      for (int ai : actors) {
        for (int oi : others) {
          if (ai == oi) continue;
          if (!s.instances[ai].alive || !s.instances[oi].alive) continue;
          if (s.instances[ai].def_index != actor_def) continue;
          if (s.instances[oi].def_index != other_def) continue;
          apply_effect(s, rule, ai, oi);
        }
      }
    }
  }
}

void termination_phase(GameState& s) {
  for (const auto& t : s.game->spec.terminations) {
    bool fired = false;
    if (t.kind == TerminationKind::SpriteCounter) {
      int idx = resolve_def(s, *t.sprite);
      fired = s.alive_count(idx) <= t.limit;
    } else {
      fired = s.tick >= t.limit;
    }
    if (fired) {
      s.outcome = t.win ? Outcome::Win : Outcome::Loss;
      if (s.log_events) {
        EngineEvent ev;
        ev.kind = EngineEvent::Kind::Termination;
        ev.tick = s.tick;
        ev.actor = t.sprite.value_or("");
        ev.win = t.win;
        s.events.push_back(ev);
      }
      return;
    }
  }
}

}  // namespace

const char* to_string(Action a) { return kActionNames[static_cast<int>(a)]; }

std::optional<Action> action_from(std::string_view s) {
  for (int i = 0; i < kActionCount; ++i) {
    if (s == kActionNames[i]) return static_cast<Action>(i);
  }
  return std::nullopt;
}

const char* to_string(PlayOutcome o) {
  switch (o) {
    case PlayOutcome::Win: return "Win";
    case PlayOutcome::Loss: return "Loss";
    case PlayOutcome::CapExit: return "CapExit";
  }
  return "?";
}

int GameState::alive_count(int def_index) const {
  int n = 0;
  for (const auto& inst : instances) {
    if (inst.alive && inst.def_index == def_index) ++n;
  }
  return n;
}

const SpriteInstance* GameState::avatar() const {
  for (const auto& inst : instances) {
    if (inst.alive && is_avatar_class(game->spec.sprites[inst.def_index].cls)) return &inst;
  }
  return nullptr;
}

std::string GameState::dump() const {
  std::ostringstream out;
  out << "tick=" << tick << " score=" << score << " outcome="
      << (outcome == Outcome::Ongoing ? "Ongoing" : outcome == Outcome::Win ? "Win" : "Loss")
      << " next_id=" << next_id << "\n";
  for (const auto& inst : instances) {
    out << inst.id << " " << game->spec.sprites[inst.def_index].name << " (" << inst.col << ","
        << inst.row << ") prev(" << inst.prev_col << "," << inst.prev_row << ")"
        << (inst.alive ? " alive" : " dead") << " facing=" << to_string(inst.facing)
        << " cd=" << inst.cooldown_left << " budget=" << format_exact(inst.move_budget)
        << " spawned=" << inst.spawned_total << " parent=" << inst.parent_id << "\n";
  }
  for (const auto& [name, count] : resources) out << "resource " << name << "=" << count << "\n";
  return out.str();
}

GameState init_state(std::shared_ptr<const Game> game, uint64_t seed) {
  GameState s;
  s.game = std::move(game);
  s.rng = Rng(seed);
  const GameSpec& spec = s.game->spec;
  const Level& lvl = s.game->level;
  for (int r = 0; r < lvl.height; ++r) {
    for (int c = 0; c < lvl.width; ++c) {
      char ch = lvl.at(c, r);
      if (ch == kBlankChar) continue;
      auto it = spec.level_mapping.find(ch);
      if (it == spec.level_mapping.end()) {
        throw EngineError(std::string("unmapped level character '") + ch + "'");
      }
      for (const auto& name : it->second) {
        spawn_instance(s, resolve_def(s, name), c, r, -1);
      }
    }
  }
  return s;
}

GameState init_state(const Game& game, uint64_t seed) {
  return init_state(std::make_shared<const Game>(game), seed);
}

void step(GameState& state, Action action) {
  if (state.outcome != Outcome::Ongoing) return;
  for (auto& inst : state.instances) {
    inst.prev_col = inst.col;
    inst.prev_row = inst.row;
  }
  avatar_phase(state, action);
  npc_phase(state);
  collision_phase(state);
  std::erase_if(state.instances, [](const SpriteInstance& i) { return !i.alive; });
  state.tick += 1;
  termination_phase(state);
}

std::vector<Action> legal_actions(const GameState& state) {
  int av = find_avatar(state);
  if (av < 0) return {Action::Nil};
  const SpriteDef& d = state.game->spec.sprites[state.instances[av].def_index];
  std::vector<Action> acts = {Action::Nil, Action::Up, Action::Down, Action::Left, Action::Right};
  if (d.cls == SpriteClass::ShootAvatar) acts.push_back(Action::Use);
  return acts;
}

PlayoutResult playout(const Game& game, const AgentFn& agent, uint64_t seed, int move_cap,
                      bool log_events, std::vector<EngineEvent>* events_out) {
  GameState state = init_state(game, seed);
  state.log_events = log_events;
  PlayoutResult result;
  while (state.outcome == Outcome::Ongoing && result.moves < move_cap) {
    Action a = agent(state);
    step(state, a);
    result.moves += 1;
  }
  result.score = state.score;
  result.outcome = state.outcome == Outcome::Win    ? PlayOutcome::Win
                   : state.outcome == Outcome::Loss ? PlayOutcome::Loss
                                                    : PlayOutcome::CapExit;
  if (events_out) *events_out = state.events;
  return result;
}

}  // namespace forge
